"""Coordinate descent for the Lasso, ``0.5*||y - X b||^2 + lam*||b||_1``.

Used to seed the working sets of the generation drivers.  The solver works on
an active set and only touches the full design through ``X^T r`` when checking
the optimality conditions over all ``p`` coordinates, so ``X^T X`` is never
formed.  When ``p <= GRAM_MAX_P`` the inner loop runs in covariance form on
the Gram matrix of the active columns only.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import EmptyGrid, NonFiniteInput
from .sparse import as_csc, column_sq_norms

GRAM_MAX_P = 10_000
MAX_NEW_PER_ROUND = 100


@dataclass
class LassoFit:
    beta: np.ndarray
    r: np.ndarray
    lam: float
    kkt_violation: float
    xtr: np.ndarray
    rounds: int = 0
    objective_trace: list = field(default_factory=list)


def soft_threshold(z, t):
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


def lasso_objective(X, y, beta, lam):
    r = y - X @ beta
    return 0.5 * float(r @ r) + lam * float(np.abs(beta).sum())


def kkt_residual(xtr, beta, lam):
    """Per-coordinate violation of the Lasso optimality conditions."""
    nz = beta != 0
    out = np.maximum(np.abs(xtr) - lam, 0.0)
    out[nz] = np.abs(xtr[nz] - lam * np.sign(beta[nz]))
    return out


def _check_inputs(X, y, lam):
    y = np.asarray(y, dtype=np.float64).ravel()
    if not np.all(np.isfinite(y)):
        raise NonFiniteInput("y contains NaN or infinite entries")
    if not np.isfinite(lam) or lam < 0:
        raise ValueError(f"lambda must be finite and nonnegative, got {lam}")
    X = as_csc(X)
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
    return X, y


def lasso_fit(X, y, lam, warm=None, *, tol=1e-8, kkt_tol=1e-7, max_rounds=10_000,
              record=False):
    """Solve the Lasso at a single ``lam``, optionally warm-started from a fit.

    Converges when a pass over the active set moves no coordinate by more
    than ``tol`` (in fitted-value scale) and the full optimality check over
    all coordinates is within ``kkt_tol``.  ``record=True`` stores the
    objective after every sweep in ``objective_trace``.
    """
    X, y = _check_inputs(X, y, lam)
    n, p = X.shape
    colsq = column_sq_norms(X)
    indptr = X.indptr.astype(np.int32)
    indices = X.indices.astype(np.int32)
    data = X.data
    beta = np.zeros(p) if warm is None else np.array(warm.beta, dtype=np.float64)
    r = y - X @ beta
    active = np.flatnonzero(beta)
    use_gram = p <= GRAM_MAX_P
    inner_tol = tol
    trace = [0.5 * float(r @ r) + lam * float(np.abs(beta).sum())] if record else []
    max_sweeps = 1 if record else 100_000

    rounds = 0
    while rounds < max_rounds:
        rounds += 1
        if active.size:
            while True:
                if use_gram:
                    XA = X[:, active]
                    G = np.ascontiguousarray((XA.T @ XA).toarray())
                    q = np.ascontiguousarray(XA.T @ r)
                    bA = np.ascontiguousarray(beta[active])
                    sweeps = _kernels.cd_gram(G, q, bA, lam, inner_tol, max_sweeps)
                    beta[active] = bA
                    r = y - X @ beta
                else:
                    sweeps = _kernels.cd_csc(indptr, indices, data, colsq, active,
                                             beta, r, lam, inner_tol, max_sweeps)
                if record:
                    trace.append(0.5 * float(r @ r) + lam * float(np.abs(beta).sum()))
                if not record or sweeps > 0:
                    break
        # refresh the residual to shed accumulated rounding from in-place updates
        r = y - X @ beta
        xtr = X.T @ r
        viol = kkt_residual(xtr, beta, lam)
        fresh = np.flatnonzero((beta == 0) & (np.abs(xtr) > lam + 0.5 * kkt_tol)
                               & (colsq > 0))
        fresh = np.setdiff1d(fresh, active, assume_unique=True)
        if fresh.size:
            if fresh.size > MAX_NEW_PER_ROUND:
                order = np.argsort(-np.abs(xtr[fresh]), kind="stable")
                fresh = fresh[order[:MAX_NEW_PER_ROUND]]
            active = np.union1d(active, fresh)
            continue
        kkt = float(viol.max()) if p else 0.0
        if kkt <= kkt_tol:
            return LassoFit(beta, r, float(lam), kkt, xtr, rounds, trace)
        inner_tol = max(inner_tol * 0.1, 1e-15)
    kkt = float(kkt_residual(X.T @ r, beta, lam).max()) if p else 0.0
    return LassoFit(beta, r, float(lam), kkt, X.T @ r, rounds, trace)


def lasso_path(X, y, lambdas, **kwargs):
    """Fits along a strictly decreasing grid, each warm-started from the last."""
    lambdas = np.asarray(lambdas, dtype=np.float64).ravel()
    if lambdas.size == 0:
        raise EmptyGrid("lambda grid is empty")
    if np.any(lambdas <= 0) or np.any(np.diff(lambdas) >= 0):
        raise ValueError("lambda grid must be positive and strictly decreasing")
    X = as_csc(X)
    fits = []
    warm = None
    for lam in lambdas:
        warm = lasso_fit(X, y, lam, warm, **kwargs)
        fits.append(warm)
    return fits


def default_eps_act(lam):
    return 1e-6 * max(lam, 1.0)


def active_sets(fit, lam=None, eps_act=None):
    """Return ``(I, J)``: near-active correlation constraints and the support."""
    lam = fit.lam if lam is None else lam
    if eps_act is None:
        eps_act = default_eps_act(lam)
    J = np.flatnonzero(fit.beta)
    I = np.flatnonzero(np.abs(fit.xtr) >= lam - eps_act)
    return I, J
