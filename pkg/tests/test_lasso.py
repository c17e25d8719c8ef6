import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from dantzig_lp import lasso
from dantzig_lp.errors import EmptyGrid, NonFiniteInput
from dantzig_lp.lasso import active_sets, kkt_residual, lasso_fit, lasso_objective, lasso_path

from oracles import prox_gradient_lasso


def orthonormal(n, seed):
    q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((n, n)))
    return q


def problem(seed, n=20, p=40):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    y = X[:, :3] @ np.array([1.5, -2.0, 1.0]) + 0.5 * rng.standard_normal(n)
    return X, y


def test_large_lambda_gives_zero():
    X, y = problem(0)
    lam = np.abs(X.T @ y).max()
    assert not lasso_fit(X, y, lam).beta.any()


@pytest.mark.parametrize("seed", range(3))
def test_orthonormal_soft_threshold(seed):
    Q = orthonormal(15, seed)
    y = np.random.default_rng(seed).standard_normal(15)
    lam = 0.4
    fit = lasso_fit(Q, y, lam)
    np.testing.assert_allclose(fit.beta, lasso.soft_threshold(Q.T @ y, lam), atol=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_matches_prox_gradient_oracle(seed):
    X, y = problem(seed)
    lam = 0.5 * np.abs(X.T @ y).max()
    fit = lasso_fit(X, y, lam)
    ref = prox_gradient_lasso(X, y, lam)
    assert lasso_objective(X, y, fit.beta, lam) == pytest.approx(
        lasso_objective(X, y, ref, lam), abs=1e-8)


def test_kkt_and_residual():
    X, y = problem(1, 30, 80)
    lam = 0.1 * np.abs(X.T @ y).max()
    fit = lasso_fit(X, y, lam)
    np.testing.assert_allclose(fit.r, y - X @ fit.beta, atol=1e-10)
    assert kkt_residual(X.T @ fit.r, fit.beta, lam).max() <= 1e-7
    assert fit.kkt_violation <= 1e-7


def test_sparse_and_large_p_paths_agree(monkeypatch):
    rng = np.random.default_rng(4)
    X = sp.random(40, 300, density=0.2, random_state=4, format="csc")
    y = rng.standard_normal(40)
    lam = 0.2 * np.abs(X.T @ y).max()
    gram = lasso_fit(X, y, lam)
    monkeypatch.setattr(lasso, "GRAM_MAX_P", 10)
    naive = lasso_fit(X, y, lam)
    assert lasso_objective(X, y, gram.beta, lam) == pytest.approx(
        lasso_objective(X, y, naive.beta, lam), abs=1e-9)


def test_nonfinite_input():
    X, y = problem(0)
    y[3] = np.nan
    with pytest.raises(NonFiniteInput):
        lasso_fit(X, y, 1.0)
    X[0, 0] = np.inf
    with pytest.raises(NonFiniteInput):
        lasso_fit(X, np.ones(20), 1.0)


def test_objective_monotone_across_sweeps():
    X, y = problem(2, 30, 60)
    lam = 0.05 * np.abs(X.T @ y).max()
    trace = lasso_fit(X, y, lam, record=True).objective_trace
    assert len(trace) > 3
    assert np.all(np.diff(trace) <= 1e-12 * max(1.0, trace[0]))


def test_path_single_point_is_zero():
    X, y = problem(0)
    fits = lasso_path(X, y, [np.abs(X.T @ y).max()])
    assert len(fits) == 1 and not fits[0].beta.any()


def test_path_empty_grid():
    X, y = problem(0)
    with pytest.raises(EmptyGrid):
        lasso_path(X, y, [])


def test_path_rejects_increasing_grid():
    X, y = problem(0)
    with pytest.raises(ValueError):
        lasso_path(X, y, [1.0, 2.0])


def test_path_fits_satisfy_kkt_and_beat_zero():
    X, y = problem(3)
    lmax = np.abs(X.T @ y).max()
    grid = lmax * np.array([0.8, 0.4, 0.1])
    for lam, fit in zip(grid, lasso_path(X, y, grid)):
        assert fit.kkt_violation <= 1e-7
        assert lasso_objective(X, y, fit.beta, lam) <= 0.5 * y @ y + 1e-12
        cold = lasso_fit(X, y, lam)
        assert lasso_objective(X, y, fit.beta, lam) == pytest.approx(
            lasso_objective(X, y, cold.beta, lam), abs=1e-7)


def test_active_sets_empty_above_lambda_max():
    X, y = problem(0)
    lam = np.abs(X.T @ y).max() * 1.01 + 1e-3
    I, J = active_sets(lasso_fit(X, y, lam), lam)
    assert I.size == 0 and J.size == 0


def test_active_sets_orthonormal_single():
    Q = orthonormal(10, 0)
    z = np.zeros(10)
    z[4] = 3.0
    z[[1, 2]] = [0.5, -0.4]
    y = Q @ z
    lam = 1.0
    I, J = active_sets(lasso_fit(Q, y, lam), lam)
    assert list(J) == [4]
    assert 4 in I


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 0.9))
def test_support_is_within_active_constraints(seed, frac):
    X, y = problem(seed, 15, 30)
    lam = frac * np.abs(X.T @ y).max()
    fit = lasso_fit(X, y, lam)
    I, J = active_sets(fit, lam)
    assert set(J) <= set(I)
