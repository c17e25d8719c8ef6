"""Fused lasso solvers used to seed the fused Dantzig selector.

``fused_dp`` solves the signal case (``X = I``) exactly in O(n) by dynamic
programming; ``fista_fused`` handles a general design with accelerated
proximal gradient, using ``fused_dp`` as the prox operator.
"""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import PowerMethodDivergence
from .sparse import as_csc

KNOT_TOL = 1e-6


@dataclass
class FusedFit:
    beta: np.ndarray
    alpha: np.ndarray
    lam: float
    knots: np.ndarray
    objective: float = np.nan
    iterations: int = 0


def differences(beta):
    """``alpha = D beta``: first entry ``beta_1``, then successive differences."""
    beta = np.asarray(beta, dtype=np.float64)
    alpha = np.empty_like(beta)
    if beta.size:
        alpha[0] = beta[0]
        alpha[1:] = np.diff(beta)
    return alpha


def cumulate(alpha):
    """``beta = H alpha`` with ``H = D^{-1}`` (prefix sums)."""
    return np.cumsum(alpha)


def knot_set(alpha, tol=KNOT_TOL):
    """Indices ``i >= 1`` (0-based) where the fit jumps by more than ``tol``."""
    return np.flatnonzero(np.abs(alpha[1:]) > tol) + 1


def total_variation(beta):
    return float(np.abs(np.diff(beta)).sum())


def fused_objective(y, beta, lam, X=None):
    fit = beta if X is None else X @ beta
    r = y - fit
    return 0.5 * float(r @ r) + lam * total_variation(beta)


def _fit(beta, lam, objective, iterations=0):
    alpha = differences(beta)
    return FusedFit(beta, alpha, float(lam), knot_set(alpha), objective, iterations)


def fused_dp(y, lam):
    """Exact 1-D fused lasso (total-variation denoising) solution."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    y = np.ascontiguousarray(y, dtype=np.float64)
    beta = _kernels.fused_dp(y, float(lam))
    return _fit(beta, lam, fused_objective(y, beta, lam))


def prox_theta(u, grad, L, lam):
    """Prox of ``(lam/L) * TV`` evaluated at the gradient step ``u - grad/L``."""
    if L <= 0:
        raise ValueError("step constant L must be positive")
    point = np.asarray(u, dtype=np.float64) - np.asarray(grad, dtype=np.float64) / L
    return _kernels.fused_dp(np.ascontiguousarray(point), float(lam) / L)


def power_method(X, iters=200, tol=1e-8, seed=0, inflate=1.01):
    """Largest eigenvalue of ``X^T X`` (inflated by ``inflate``)."""
    X = as_csc(X)
    p = X.shape[1]
    if p == 0:
        return 1.0
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(p)
    w /= np.linalg.norm(w)
    est = 0.0
    for _ in range(iters):
        z = X.T @ (X @ w)
        new = float(np.linalg.norm(z))
        if not np.isfinite(new):
            raise PowerMethodDivergence("power iteration produced non-finite values")
        if new == 0.0:
            return 1.0
        w = z / new
        if abs(new - est) <= tol * new:
            est = new
            break
        est = new
    return est * inflate


def fista_fused(X, y, lam, max_iter=10_000, *, L=None, rtol=1e-8, window=10):
    """Accelerated proximal gradient for ``0.5||y - X b||^2 + lam*TV(b)``.

    Stops when the objective of the current iterate changes by less than
    ``rtol`` (relative) over ``window`` iterations, or after ``max_iter``
    iterations.  Returns the best iterate seen.
    """
    X = as_csc(X)
    y = np.asarray(y, dtype=np.float64)
    if L is None:
        L = power_method(X)
    p = X.shape[1]
    u = np.zeros(p)
    prev = np.zeros(p)
    q = 1.0
    best = prev.copy()
    best_obj = fused_objective(y, best, lam, X)
    # the accelerated sequence is not monotone, so the best value alone can
    # stall through a ripple; track the current iterate instead
    history = [best_obj]
    k = 0
    for k in range(1, max_iter + 1):
        grad = -(X.T @ (y - X @ u))
        cur = prox_theta(u, grad, L, lam)
        q_next = (1.0 + np.sqrt(1.0 + 4.0 * q * q)) / 2.0
        u = cur + ((q - 1.0) / q_next) * (cur - prev)
        prev, q = cur, q_next
        obj = fused_objective(y, cur, lam, X)
        if obj < best_obj:
            best, best_obj = cur.copy(), obj
        history.append(obj)
        if k >= window:
            old = history[-1 - window]
            if abs(old - obj) <= rtol * max(abs(old), 1e-300):
                break
    return _fit(best, lam, best_obj, k)
