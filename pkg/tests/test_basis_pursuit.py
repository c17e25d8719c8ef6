import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dantzig_lp.basis_pursuit import bp_init_columns, full_bp, solve_bp, span_residual
from dantzig_lp.errors import InitInfeasible
from dantzig_lp.simplex import Status
from dantzig_lp.sparse import as_csc

from oracles import bp_objective


def sparse_instance(seed, n=40, p=100, k=5):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    beta0 = np.zeros(p)
    beta0[rng.choice(p, k, replace=False)] = rng.standard_normal(k)
    return X, X @ beta0, beta0


def test_init_identity_recovers_support():
    y = np.array([1.0, 0.0, -2.0, 0.0, 3.0, 0.0])
    assert list(bp_init_columns(np.eye(6), y)) == [0, 2, 4]


def test_init_single_column():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((20, 50))
    J = bp_init_columns(X, X[:, 17].copy())
    assert 17 in J and len(J) <= 3


def test_init_zero_y():
    assert bp_init_columns(np.ones((3, 4)), np.zeros(3)).size == 0


@pytest.mark.parametrize("seed", range(5))
def test_init_spans_y(seed):
    X, y, _ = sparse_instance(seed, 40, 120, 8)
    J = bp_init_columns(X, y)
    assert len(J) <= 40
    assert span_residual(as_csc(X), y, J)[0] <= 1e-8 * np.linalg.norm(y)


def test_init_greedy_fallback(monkeypatch):
    from dantzig_lp import basis_pursuit
    monkeypatch.setattr(basis_pursuit, "CONTINUATION_STEPS", 1)
    X, y, _ = sparse_instance(1, 30, 90, 10)
    J = bp_init_columns(X, y)
    assert span_residual(as_csc(X), y, J)[0] <= 1e-8 * np.linalg.norm(y)


def test_init_infeasible():
    X = np.zeros((4, 3))
    X[:2] = np.random.default_rng(0).standard_normal((2, 3))
    with pytest.raises(InitInfeasible):
        bp_init_columns(X, np.array([1.0, 1.0, 1.0, 1.0]))


def test_identity_design():
    y = np.array([1.0, -0.5, 0.0, 2.5])
    sol = solve_bp(np.eye(4), y)
    np.testing.assert_allclose(sol.beta, y, atol=1e-12)
    assert sol.objective == pytest.approx(np.abs(y).sum())


@pytest.mark.parametrize("seed", range(3))
def test_square_nonsingular(seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((12, 12)) + 3 * np.eye(12)
    y = rng.standard_normal(12)
    np.testing.assert_allclose(solve_bp(X, y).beta, np.linalg.solve(X, y), atol=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_exact_recovery_and_oracle(seed):
    X, y, beta0 = sparse_instance(seed)
    sol = solve_bp(X, y)
    ref, ref_beta = bp_objective(X, y)
    assert sol.status is Status.OPTIMAL
    assert sol.objective == pytest.approx(ref, rel=1e-6)
    assert sol.objective == pytest.approx(full_bp(X, y).objective, abs=1e-7)
    assert sol.residual <= 1e-8 * (1 + np.abs(y).max())
    assert sol.max_column_violation <= 1e-4
    if np.max(np.abs(ref_beta - beta0)) < 1e-6:
        np.testing.assert_allclose(sol.beta, beta0, atol=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_dual_certificate(seed):
    X, y, _ = sparse_instance(seed, 30, 90, 8)
    sol = solve_bp(X, y)
    assert float(sol.v @ y) == pytest.approx(sol.objective, rel=1e-7)
    assert sol.dual_objective == pytest.approx(sol.objective, rel=1e-7)


def test_objectives_nonincreasing_from_small_start():
    X, y, _ = sparse_instance(3, 30, 150, 10)
    rng = np.random.default_rng(1)
    J = np.union1d(rng.choice(150, 25, replace=False), bp_init_columns(X, y))
    sol = solve_bp(X, y, init=J)
    objs = [t.objective for t in sol.trace if np.isfinite(t.objective)] + [sol.objective]
    assert len(objs) > 1
    assert np.all(np.diff(objs) <= 1e-9)
    assert sol.objective == pytest.approx(bp_objective(X, y)[0], rel=1e-6)


def test_nonspanning_start_is_repaired():
    X, y, _ = sparse_instance(4, 20, 60, 4)
    sol = solve_bp(X, y, init=[0])
    assert sol.status is Status.OPTIMAL
    assert sol.objective == pytest.approx(bp_objective(X, y)[0], rel=1e-6)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        solve_bp(np.eye(3), np.ones(4))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_full_property(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 20))
    p = int(rng.integers(n, 3 * n + 1))
    X = rng.standard_normal((n, p))
    y = rng.standard_normal(n)
    sol = solve_bp(X, y)
    assert sol.status is Status.OPTIMAL
    assert sol.objective == pytest.approx(full_bp(X, y).objective, rel=1e-7, abs=1e-9)
    assert sol.residual <= 1e-8 * (1 + np.abs(y).max())
