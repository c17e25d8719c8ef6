import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from dantzig_lp import simplex
from dantzig_lp.dantzig import (DSOptions, build_reduced_ds, full_lp, solve_ds, solve_ds_path,
                                violation_scan_columns, violation_scan_constraints)
from dantzig_lp.lasso import soft_threshold
from dantzig_lp.simplex import Status

from oracles import ds_objective


def instance(seed, n=20, p=60, k=3, noise=0.3):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    X /= np.linalg.norm(X, axis=0)
    beta0 = np.zeros(p)
    beta0[rng.choice(p, k, replace=False)] = rng.standard_normal(k) * 2
    e0 = noise * rng.standard_normal(n)
    return X, X @ beta0 + e0, e0


def brute_scan(values, threshold, eps, exclude=()):
    idx = [i for i, v in enumerate(values) if v > threshold + eps and i not in set(exclude)]
    return sorted(idx, key=lambda i: (-values[i], i))


def test_reduced_empty_sets():
    X, y, _ = instance(0)
    model, basis = build_reduced_ds(X, y, 1.0, [], [])
    sol, _ = simplex.solve(model, basis)
    assert sol.objective == pytest.approx(0.0)
    np.testing.assert_allclose(sol.x[:20], y)


def test_reduced_full_sets_is_full_lp():
    X, y, e0 = instance(1)
    lam = np.abs(X.T @ e0).max()
    model, basis = build_reduced_ds(X, y, lam, np.arange(60), np.arange(60))
    assert model.n_rows == 20 + 60 and model.n_cols == 20 + 120
    sol, _ = simplex.solve(model, basis)
    assert sol.objective == pytest.approx(ds_objective(X, y, lam)[0], abs=1e-7)


@pytest.mark.parametrize("seed", range(3))
def test_reduced_sandwich(seed):
    X, y, _ = instance(seed, 10, 25)
    lam = 0.3 * np.abs(X.T @ y).max()
    full = ds_objective(X, y, lam)[0]
    rng = np.random.default_rng(seed)
    I = rng.choice(25, 8, replace=False)
    J = rng.choice(25, 12, replace=False)
    allp = np.arange(25)
    relaxed, _ = simplex.solve(*build_reduced_ds(X, y, lam, I, allp))
    assert relaxed.objective <= full + 1e-9
    restricted, _ = simplex.solve(*build_reduced_ds(X, y, lam, allp, J))
    if restricted.status is Status.OPTIMAL:
        assert restricted.objective >= full - 1e-9
    else:
        assert restricted.status is Status.INFEASIBLE


def test_lambda_above_max_gives_zero():
    X, y, _ = instance(2)
    sol = solve_ds(X, y, np.abs(X.T @ y).max())
    assert sol.objective == 0.0 and not sol.beta.any()


@pytest.mark.parametrize("seed", range(3))
def test_orthonormal_soft_threshold(seed):
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((15, 15)))
    y = rng.standard_normal(15) * 2
    lam = 0.5
    sol = solve_ds(Q, y, lam)
    np.testing.assert_allclose(sol.beta, soft_threshold(Q.T @ y, lam), atol=1e-8)


@pytest.mark.parametrize("seed", range(10))
def test_matches_full_lp_and_highs(seed):
    X, y, e0 = instance(seed)
    lam = np.abs(X.T @ e0).max()
    sol = solve_ds(X, y, lam)
    assert sol.status is Status.OPTIMAL
    assert sol.objective == pytest.approx(full_lp(X, y, lam).objective, abs=1e-7)
    assert sol.objective == pytest.approx(ds_objective(X, y, lam)[0], abs=1e-7)
    np.testing.assert_allclose(sol.r, y - X @ sol.beta, atol=1e-9)
    assert sol.max_constraint_violation <= 1e-4 and sol.max_column_violation <= 1e-4
    assert sol.dual_bound == pytest.approx(sol.objective, rel=1e-6, abs=1e-9)


def test_sparse_design():
    rng = np.random.default_rng(11)
    X = sp.random(30, 200, density=0.2, random_state=11, format="csc")
    y = X[:, :4] @ np.ones(4) + 0.05 * rng.standard_normal(30)
    lam = 0.2 * np.abs(X.T @ y).max()
    assert solve_ds(X, y, lam).objective == pytest.approx(ds_objective(X, y, lam)[0], abs=1e-7)


def test_constraint_scan_cases():
    X, y, _ = instance(3)
    assert violation_scan_constraints(X, np.zeros(20), 1.0, 1e-4).size == 0
    Xc = X.copy()
    Xc[:, 7] = y / np.linalg.norm(y)
    assert violation_scan_constraints(Xc, y, 0.0, 1e-4)[0] == 7


def test_column_scan_cases():
    X, _, _ = instance(4)
    assert violation_scan_columns(X, np.zeros(20), 1e-4).size == 0
    alpha = np.random.default_rng(0).standard_normal(20)
    alpha *= 2 / np.linalg.norm(alpha)
    Xc = X.copy()
    Xc[:, 11] = alpha / 2
    idx = violation_scan_columns(Xc, alpha, 1e-4)
    assert idx[0] == 11
    assert abs(Xc[:, 11] @ alpha) == pytest.approx(2.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 10), st.floats(0, 1e-2))
def test_scans_match_brute_force(seed, limit, eps):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((8, 30))
    v = rng.standard_normal(8)
    corr = np.abs(X.T @ v)
    lam = float(np.median(corr))
    exclude = rng.choice(30, 5, replace=False)
    got = violation_scan_constraints(X, v, lam, eps, limit, exclude)
    assert list(got) == brute_scan(corr, lam, eps, exclude)[:limit]
    got = violation_scan_columns(X, v / lam, eps, limit, exclude)
    assert list(got) == brute_scan(corr / lam, 1.0, eps, exclude)[:limit]


def test_path_single_point_zero():
    X, y, _ = instance(5)
    (sol,) = solve_ds_path(X, y, [1.1 * np.abs(X.T @ y).max()])
    assert sol.objective == 0.0


def test_path_matches_cold_solves():
    X, y, e0 = instance(6)
    lmax = np.abs(X.T @ y).max()
    grid = np.geomspace(lmax, 0.5 * np.abs(X.T @ e0).max(), 5)
    path = solve_ds_path(X, y, grid)
    objs = [s.objective for s in path]
    assert np.all(np.diff(objs) >= -1e-9)
    for lam, sol in zip(grid, path):
        assert sol.objective == pytest.approx(solve_ds(X, y, lam).objective, abs=1e-7)


def test_path_rejects_bad_grid():
    X, y, _ = instance(0)
    with pytest.raises(ValueError):
        solve_ds_path(X, y, [1.0, 1.0])
    with pytest.raises(ValueError):
        solve_ds_path(X, y, [])


def test_outer_progress_monotone():
    X, y, e0 = instance(7, 30, 150, k=6)
    lam = np.abs(X.T @ e0).max()
    rng = np.random.default_rng(0)
    S = rng.choice(150, 5, replace=False)
    sol = solve_ds(X, y, lam, init=(S, S))
    objs = [t.objective for t in sol.trace] + [sol.objective]
    assert len(sol.trace) > 1
    for rec, nxt in zip(sol.trace, objs[1:]):
        if np.isnan(rec.objective) or np.isnan(nxt):
            continue
        if rec.added_rows:
            assert nxt >= rec.objective - 1e-9
        elif rec.added_cols:
            assert nxt <= rec.objective + 1e-9


def test_infeasible_restriction_is_repaired():
    X, y, e0 = instance(8)
    lam = 0.5 * np.abs(X.T @ e0).max()
    sol = solve_ds(X, y, lam, init=(np.arange(60), []))
    assert sol.status is Status.OPTIMAL
    assert sol.objective == pytest.approx(ds_objective(X, y, lam)[0], abs=1e-7)


def test_iteration_limit_reports_metrics():
    X, y, e0 = instance(9, 30, 150, k=6)
    lam = 0.5 * np.abs(X.T @ e0).max()
    sol = solve_ds(X, y, lam, DSOptions(max_outer=1), init=([], [0]))
    assert sol.status is Status.ITERATION_LIMIT
    assert np.isfinite(sol.max_constraint_violation)


def test_negative_lambda():
    X, y, _ = instance(0)
    with pytest.raises(ValueError):
        solve_ds(X, y, -1.0)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 1.0))
def test_cg_equals_full_lp_property(seed, frac):
    rng = np.random.default_rng(seed)
    n, p = int(rng.integers(5, 30)), int(rng.integers(5, 80))
    X, y, _ = instance(seed, n, p, k=min(3, p))
    lam = frac * np.abs(X.T @ y).max()
    sol = solve_ds(X, y, lam)
    assert sol.status is Status.OPTIMAL
    assert sol.objective == pytest.approx(full_lp(X, y, lam).objective, abs=1e-7)
