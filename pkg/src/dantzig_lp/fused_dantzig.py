"""Fused Dantzig selector: signal estimation and regression.

Signal case (``X = I``), with ``A = {0}`` and ``B = {1..n-1}`` (0-based)::

    min   sum_{j in B} (a+_j + a-_j)
    s.t.  a+_j - a-_j + [j = 0] a_0 - (D beta)_j = 0     (duals v)
          beta + r = y
          D^T g - r = 0          (so g = H^T r, suffix sums of r)
          g_0 = 0                (fixed by its bounds)
          -lam <= g_i <= lam,    i in I (generated)

``D`` is the difference operator with ``D beta = (beta_0, beta_1 - beta_0, ...)``
and ``H = D^{-1}`` the lower-triangular ones matrix.  Every generated
variable touches one row, so the reduced costs are ``1 -/+ v_j``, and every
generated constraint is a bound on one ``g_i``; both checks are O(1).

Regression reduces to an l1 Dantzig selector on centered data
``(y~, X~)`` with ``X~ = (I - P_A) X H_B``; see :func:`projected_data`.
"""
from dataclasses import dataclass, replace
import logging
import time

import numpy as np
import scipy.sparse as sp

from . import simplex
from .dantzig import DantzigSolution, DSOptions, solve_ds
from .fused_prox import differences, fista_fused, fused_dp
from .generation import GenerationOptions, generate, rank_violations
from .lasso import default_eps_act
from .simplex import AT_LOWER, BASIC, Basis, Status
from .sparse import as_csc

log = logging.getLogger(__name__)

FUSED_BATCH = 40
ACTIVE_RTOL = 1e-6


@dataclass
class FusedOptions(GenerationOptions):
    col_batch: int = FUSED_BATCH
    row_batch: int = FUSED_BATCH
    max_pivots: int = simplex.MAX_PIVOTS


def suffix_sums(r):
    """``H^T r``: entry ``i`` is ``sum_{k >= i} r_k``."""
    return np.cumsum(np.asarray(r, dtype=np.float64)[::-1])[::-1]


def price_fused_columns(duals, J, eps, limit=None):
    """Excluded ``j in B`` whose cheaper reduced cost ``1 - |v_j|`` is below ``-eps``.

    Returns ``(indices, reduced_costs)``, most negative first.
    """
    v = np.asarray(duals, dtype=np.float64)
    excl = np.concatenate([[0], np.asarray(J, dtype=np.intp)]).astype(np.intp)
    idx, amount = rank_violations(np.abs(v) - 1.0, eps, limit, excl)
    return idx, -amount


def check_fused_constraints(g, I, lam, eps, limit=None):
    """Excluded ``i in B`` with ``|g_i| > lam + eps``; returns ``(indices, excess)``."""
    g = np.asarray(g, dtype=np.float64)
    excl = np.concatenate([[0], np.asarray(I, dtype=np.intp)]).astype(np.intp)
    return rank_violations(np.abs(g) - lam, eps, limit, excl)


@dataclass
class FusedDsModel:
    n: int
    lam: float
    I: list
    J: list


class FusedSession:
    """The compact fused LP on working sets ``I, J`` (both subsets of ``B``)."""

    def __init__(self, y, lam, I=(), J=(), max_pivots=simplex.MAX_PIVOTS):
        self.y = np.asarray(y, dtype=np.float64).ravel()
        self.n = n = self.y.size
        self.lam = float(lam)
        self.max_pivots = max_pivots
        self.sol = None
        # columns: a_0 | beta (n) | r (n) | g (n)
        self.ob, self.orr, self.og = 1, 1 + n, 1 + 2 * n
        D = sp.diags([np.ones(n), -np.ones(n - 1)], [0, -1], shape=(n, n), format="csc")
        In = sp.identity(n, format="csc")
        Z = sp.csc_matrix((n, n))
        e0 = sp.csc_matrix(([1.0], ([0], [0])), shape=(n, 1))
        z1 = sp.csc_matrix((n, 1))
        A = sp.bmat([[e0, -D, Z, Z],
                     [z1, In, In, Z],
                     [z1, Z, -In, D.T]], format="csc")
        ncol = 1 + 3 * n
        var_lo = np.full(ncol, -np.inf)
        var_hi = np.full(ncol, np.inf)
        var_lo[self.og] = var_hi[self.og] = 0.0
        rhs = np.concatenate([np.zeros(n), self.y, np.zeros(n)])
        self.model = simplex.build_model(np.zeros(ncol), A, (rhs, rhs), (var_lo, var_hi))
        # crash basis: every free variable basic; it is nonsingular (beta is
        # forced constant, g_0 = 0 pins the constant) and dual feasible
        col_status = np.full(ncol, BASIC, dtype=np.int8)
        col_status[self.og] = AT_LOWER
        head = np.concatenate([np.arange(self.og), np.arange(self.og + 1, ncol)])
        self.basis = Basis(head.astype(np.intp), col_status,
                           np.full(3 * n, AT_LOWER, dtype=np.int8))
        self.I, self.J = [], []
        self.plus, self.minus = [], []
        J = np.setdiff1d(np.asarray(J, dtype=np.intp), [0])
        I = np.setdiff1d(np.asarray(I, dtype=np.intp), [0])
        if J.size:
            self.add_cols(J)
        if I.size:
            self.add_rows(I)

    def describe(self):
        return FusedDsModel(self.n, self.lam, sorted(self.I), sorted(self.J))

    def sizes(self):
        return len(self.I), len(self.J)

    def solve(self):
        self.sol, self.basis = simplex.solve(self.model, self.basis,
                                             max_pivots=self.max_pivots)
        return self.sol

    def beta(self, sol):
        return sol.x[self.ob:self.ob + self.n].copy()

    def g(self, sol):
        return sol.x[self.og:self.og + self.n].copy()

    def duals(self, sol):
        return sol.v[:self.n]

    def row_violations(self, sol, eps):
        return check_fused_constraints(self.g(sol), self.I, self.lam, eps)

    def col_violations(self, sol, eps):
        idx, rc = price_fused_columns(self.duals(sol), self.J, eps)
        return idx, -rc

    def repair_columns(self, sol):
        f = np.abs(sol.farkas[:self.n])
        excl = [0] + self.J
        return rank_violations(f, 1e-12, None, excl)

    def add_rows(self, idx):
        idx = np.asarray(idx, dtype=np.intp)
        k = idx.size
        rows = sp.csr_matrix((np.ones(k), (np.arange(k), self.og + idx)),
                             shape=(k, self.model.n_cols))
        self.model, self.basis = simplex.add_rows(
            self.model, self.basis, rows, (np.full(k, -self.lam), np.full(k, self.lam)))
        self.I.extend(idx.tolist())

    def add_cols(self, idx):
        idx = np.asarray(idx, dtype=np.intp)
        k = idx.size
        m = self.model.n_rows
        cols = sp.csc_matrix((np.concatenate([np.ones(k), -np.ones(k)]),
                              (np.concatenate([idx, idx]), np.arange(2 * k))), shape=(m, 2 * k))
        start = self.model.n_cols
        self.model, self.basis = simplex.add_columns(self.model, self.basis, cols,
                                                     np.ones(2 * k))
        self.plus.extend(range(start, start + k))
        self.minus.extend(range(start + k, start + 2 * k))
        self.J.extend(idx.tolist())

    def result(self, status, sol, trace, pivots, seconds=0.0, init_seconds=0.0):
        beta = self.beta(sol)
        r = self.y - beta
        g = suffix_sums(r)
        v = self.duals(sol).copy()
        con = float(np.max(np.abs(g[1:])) - self.lam) if self.n > 1 else 0.0
        vmax = float(np.max(np.abs(v[1:]))) if self.n > 1 else 0.0
        bound = sol.dual_objective / max(1.0, vmax) if status is Status.OPTIMAL else np.nan
        return DantzigSolution(
            beta=beta, r=r, alpha=v, lam=self.lam,
            objective=float(np.abs(np.diff(beta)).sum()), dual_bound=float(bound),
            max_constraint_violation=max(con, abs(float(g[0])), 0.0) if self.n else 0.0,
            max_column_violation=max(vmax - 1.0, 0.0),
            status=status, I=np.array(sorted(self.I), dtype=np.intp),
            J=np.array(sorted(self.J), dtype=np.intp), trace=trace, pivots=pivots,
            seconds=seconds, init_seconds=init_seconds)


def build_fused_model(y, lam, I=(), J=()):
    """The reduced compact LP; returns ``(FusedDsModel, LpModel)``."""
    s = FusedSession(y, lam, I, J)
    return s.describe(), s.model


def fused_seed(y, lam):
    """Working sets from the exact fused lasso fit at ``lam``."""
    fit = fused_dp(y, lam)
    g = suffix_sums(np.asarray(y, dtype=np.float64) - fit.beta)
    I = np.flatnonzero(np.abs(g) >= lam * (1.0 - ACTIVE_RTOL))
    return I[I > 0], fit.knots


def solve_fused_signal(y, lam, opts=None, *, init=None, **overrides):
    """Fused Dantzig selector for signal estimation (``X = I``).

    ``init`` is ``None`` (seeded from the fused lasso fit) or ``(I, J)``.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    opts = FusedOptions() if opts is None else opts
    if overrides:
        opts = replace(opts, **overrides)
    y = np.asarray(y, dtype=np.float64).ravel()
    t0 = time.perf_counter()
    I, J = fused_seed(y, lam) if init is None else init
    t_init = time.perf_counter() - t0
    session = FusedSession(y, lam, I, J, opts.max_pivots)
    status, sol, trace, pivots = generate(session, opts)
    if status is not Status.OPTIMAL:
        log.warning("fused generation stopped with status %s", status.value)
    return session.result(status, sol, trace, pivots, time.perf_counter() - t0, t_init)


@dataclass
class ProjectedData:
    y: np.ndarray      # y - mean(y)
    X: np.ndarray      # centered suffix sums of the columns of X, n x (p-1)


def projected_data(X, y):
    """``(y~, X~)`` with ``P_A`` the projection onto the constant vector.

    Column ``j`` of ``X H`` is ``sum_{k >= j} X_k``; ``H_B`` drops ``j = 0``.
    """
    X = as_csc(X)
    y = np.asarray(y, dtype=np.float64).ravel()
    dense = X.toarray()
    XH = np.cumsum(dense[:, ::-1], axis=1)[:, ::-1]
    XB = XH[:, 1:]
    return ProjectedData(y - y.mean(), XB - XB.mean(axis=0))


def recover_alpha_a(X, y, alpha_b):
    """Intercept ``alpha_0`` making ``1^T (y - X H alpha) = 0``.

    Falls back to the mean of ``y - X H_B alpha_B`` when ``1^T X 1`` vanishes.
    """
    X = as_csc(X)
    p = X.shape[1]
    beta_b = np.concatenate([[0.0], np.cumsum(alpha_b)]) if p else np.zeros(0)
    resid = y - X @ beta_b
    denom = float(np.asarray(X.sum()))
    if abs(denom) > 1e-12 * max(1.0, abs(X).sum()):
        return float(resid.sum()) / denom
    return float(resid.mean())


def solve_fused_regression(X, y, lam, opts=None, *, fista_iter=10_000, **overrides):
    """Fused Dantzig selector with a general design.

    Seeds ``(I, J)`` from a FISTA fused lasso fit, solves the l1 Dantzig
    selector on the projected data and maps the answer back to ``beta``.
    ``I`` and ``J`` in the result index ``B`` in the coordinates of ``beta``.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    opts = DSOptions() if opts is None else opts
    if overrides:
        opts = replace(opts, **overrides)
    X = as_csc(X)
    y = np.asarray(y, dtype=np.float64).ravel()
    t0 = time.perf_counter()
    proj = projected_data(X, y)
    fit = fista_fused(X, y, lam, fista_iter)
    alpha_b = differences(fit.beta)[1:]
    J = fit.knots - 1
    corr = np.abs(proj.X.T @ (proj.y - proj.X @ alpha_b))
    eps_act = default_eps_act(lam) if opts.eps_act is None else opts.eps_act
    I = np.flatnonzero(corr >= lam - eps_act)
    t_init = time.perf_counter() - t0
    ds = solve_ds(proj.X, proj.y, lam, opts, init=(I, J))
    a0 = recover_alpha_a(X, y, ds.beta)
    beta = np.cumsum(np.concatenate([[a0], ds.beta]))
    ds.beta = beta
    ds.r = y - X @ beta
    ds.I = ds.I + 1
    ds.J = ds.J + 1
    ds.seconds = time.perf_counter() - t0
    ds.init_seconds += t_init
    return ds
