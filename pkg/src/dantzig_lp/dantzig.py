"""Column and constraint generation for the l1 Dantzig selector.

Solves ``min ||b||_1  s.t.  ||X^T (y - X b)||_inf <= lam`` through the LP in
``(b+, b-, r)``::

    min   sum(b+ + b-)
    s.t.  r + X_J (b+_J - b-_J) = y            (n equality rows, duals alpha)
          -lam <= X_i^T r <= lam,   i in I      (generated range rows)
          b+, b- >= 0,  r free

Only the columns ``J`` and constraints ``I`` are materialized; ``X^T X`` is
never formed.  Excluded constraints are checked through ``X^T r`` and
excluded columns through ``X^T alpha`` (reduced costs ``1 -/+ X_j^T alpha``).
"""
from dataclasses import dataclass, field, replace
import logging
import time

import numpy as np
import scipy.sparse as sp

from . import simplex
from .generation import GenerationOptions, generate, rank_violations
from .lasso import active_sets, default_eps_act, lasso_fit
from .simplex import AT_LOWER, BASIC, Basis, Status
from .sparse import as_csc

log = logging.getLogger(__name__)


@dataclass
class DSOptions(GenerationOptions):
    eps_act: float = None
    max_pivots: int = simplex.MAX_PIVOTS


@dataclass
class DantzigSolution:
    beta: np.ndarray
    r: np.ndarray
    alpha: np.ndarray
    lam: float
    objective: float
    dual_bound: float
    max_constraint_violation: float
    max_column_violation: float
    status: Status
    I: np.ndarray
    J: np.ndarray
    trace: list = field(default_factory=list)
    pivots: int = 0
    seconds: float = 0.0
    init_seconds: float = 0.0

    @property
    def support(self):
        return np.flatnonzero(self.beta)


def violation_scan_constraints(X, r, lam, eps, limit=None, exclude=None):
    """Ranked indices ``i`` with ``|X_i^T r| > lam + eps``."""
    corr = np.abs(X.T @ r)
    return rank_violations(corr - lam, eps, limit, exclude)[0]


def violation_scan_columns(X, alpha, eps, limit=None, exclude=None):
    """Ranked indices ``j`` with ``|X_j^T alpha| > 1 + eps``."""
    corr = np.abs(X.T @ alpha)
    return rank_violations(corr - 1.0, eps, limit, exclude)[0]


def build_reduced_ds(X, y, lam, I, J):
    """The restricted LP ``DS(I, J)`` with a crash basis.

    Variable order is ``r`` (n), then ``b+_J``, then ``b-_J``; rows are the
    n equalities followed by one range row per ``I``.  The crash basis has
    ``r`` and the range-row slacks basic; it is dual feasible, so the first
    solve runs dual simplex.  Returns ``(model, basis)``.
    """
    X = as_csc(X)
    n = X.shape[0]
    I = np.asarray(I, dtype=np.intp)
    J = np.asarray(J, dtype=np.intp)
    XJ = X[:, J]
    XI_T = X[:, I].T
    k, q = I.size, J.size
    A = sp.bmat([[sp.identity(n), XJ, -XJ],
                 [XI_T, sp.csr_matrix((k, q)), sp.csr_matrix((k, q))]], format="csc")
    if A.shape != (n + k, n + 2 * q):
        A = sp.csc_matrix((n + k, n + 2 * q))
    c = np.concatenate([np.zeros(n), np.ones(2 * q)])
    row_lo = np.concatenate([y, np.full(k, -lam)])
    row_hi = np.concatenate([y, np.full(k, lam)])
    var_lo = np.concatenate([np.full(n, -np.inf), np.zeros(2 * q)])
    var_hi = np.full(n + 2 * q, np.inf)
    model = simplex.build_model(c, A, (row_lo, row_hi), (var_lo, var_hi))
    col_status = np.full(n + 2 * q, AT_LOWER, dtype=np.int8)
    col_status[:n] = BASIC
    row_status = np.full(n + k, BASIC, dtype=np.int8)
    row_status[:n] = AT_LOWER
    head = np.concatenate([np.arange(n), -1 - np.arange(n, n + k)]).astype(np.intp)
    return model, Basis(head, col_status, row_status)


class DantzigSession:
    """One reduced ``DS(I, J)`` LP plus its basis, grown in place."""

    def __init__(self, X, y, lam, I, J, max_pivots=simplex.MAX_PIVOTS):
        self.X = as_csc(X)
        self.y = np.asarray(y, dtype=np.float64)
        self.n, self.p = self.X.shape
        self.lam = float(lam)
        self.I = list(np.unique(np.asarray(I, dtype=np.intp)))
        self.J = list(np.unique(np.asarray(J, dtype=np.intp)))
        self.plus = []
        self.minus = []
        self.max_pivots = max_pivots
        self.model, self.basis = build_reduced_ds(self.X, self.y, self.lam, self.I, self.J)
        q = len(self.J)
        self.plus = list(range(self.n, self.n + q))
        self.minus = list(range(self.n + q, self.n + 2 * q))
        self.sol = None

    def sizes(self):
        return len(self.I), len(self.J)

    def set_lambda(self, lam):
        self.lam = float(lam)
        k = len(self.I)
        rows = np.arange(self.n, self.n + k)
        self.model = simplex.set_row_bounds(self.model, rows,
                                            (np.full(k, -lam), np.full(k, lam)))

    def solve(self):
        self.sol, self.basis = simplex.solve(self.model, self.basis,
                                             max_pivots=self.max_pivots)
        return self.sol

    # -- extraction --------------------------------------------------------
    def beta(self, sol=None):
        sol = sol or self.sol
        b = np.zeros(self.p)
        if self.J:
            b[self.J] = sol.x[self.plus] - sol.x[self.minus]
        return b

    def residual(self, sol=None):
        return (sol or self.sol).x[:self.n]

    def alpha(self, sol=None):
        return (sol or self.sol).v[:self.n]

    # -- generation hooks --------------------------------------------------
    def row_violations(self, sol, eps):
        amount = np.abs(self.X.T @ self.residual(sol)) - self.lam
        return rank_violations(amount, eps, None, self.I)

    def col_violations(self, sol, eps):
        amount = np.abs(self.X.T @ self.alpha(sol)) - 1.0
        return rank_violations(amount, eps, None, self.J)

    def repair_columns(self, sol):
        amount = np.abs(self.X.T @ sol.farkas[:self.n])
        return rank_violations(amount, 1e-12, None, self.J)

    def add_rows(self, idx):
        idx = np.asarray(idx, dtype=np.intp)
        k = idx.size
        ncols = self.model.n_cols
        rows = sp.hstack([self.X[:, idx].T, sp.csr_matrix((k, ncols - self.n))], format="csr")
        self.model, self.basis = simplex.add_rows(
            self.model, self.basis, rows, (np.full(k, -self.lam), np.full(k, self.lam)))
        self.I.extend(idx.tolist())

    def add_cols(self, idx):
        idx = np.asarray(idx, dtype=np.intp)
        k = idx.size
        XJ = self.X[:, idx]
        pad = sp.csc_matrix((self.model.n_rows - self.n, k))
        block = sp.vstack([sp.hstack([XJ, -XJ]), sp.hstack([pad, pad])], format="csc")
        start = self.model.n_cols
        self.model, self.basis = simplex.add_columns(self.model, self.basis, block,
                                                     np.ones(2 * k))
        self.plus.extend(range(start, start + k))
        self.minus.extend(range(start + k, start + 2 * k))
        self.J.extend(idx.tolist())

    # -- reporting ---------------------------------------------------------
    def result(self, status, sol, trace, pivots, seconds=0.0, init_seconds=0.0):
        beta = self.beta(sol)
        r = self.y - self.X @ beta
        alpha = self.alpha(sol).copy()
        con = float(np.max(np.abs(self.X.T @ r)) - self.lam) if self.p else 0.0
        xta = float(np.max(np.abs(self.X.T @ alpha))) if self.p else 0.0
        # (alpha, nu) scaled into the full dual feasible region gives a valid bound
        bound = sol.dual_objective / max(1.0, xta) if status is Status.OPTIMAL else np.nan
        return DantzigSolution(
            beta=beta, r=r, alpha=alpha, lam=self.lam,
            objective=float(np.abs(beta).sum()), dual_bound=float(bound),
            max_constraint_violation=max(con, 0.0),
            max_column_violation=max(xta - 1.0, 0.0),
            status=status, I=np.array(sorted(self.I), dtype=np.intp),
            J=np.array(sorted(self.J), dtype=np.intp), trace=trace, pivots=pivots,
            seconds=seconds, init_seconds=init_seconds)


def lasso_seed(X, y, lam, eps_act=None, warm=None):
    """Working sets from a Lasso fit at ``lam``; an empty support gets the top column."""
    fit = lasso_fit(X, y, lam, warm)
    I, J = active_sets(fit, lam, default_eps_act(lam) if eps_act is None else eps_act)
    if J.size == 0 and X.shape[1]:
        J = np.array([int(np.argmax(np.abs(X.T @ y)))])
    return I, J, fit


def _options(opts, overrides):
    opts = DSOptions() if opts is None else opts
    return replace(opts, **overrides) if overrides else opts


def solve_ds(X, y, lam, opts=None, *, init=None, **overrides):
    """Dantzig selector at a single ``lam`` by column and constraint generation.

    ``init`` is ``None`` (Lasso seeding) or an explicit ``(I, J)`` pair.
    Keyword overrides are applied to ``opts`` (a :class:`DSOptions`).
    """
    opts = _options(opts, overrides)
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    X = as_csc(X)
    y = np.asarray(y, dtype=np.float64)
    t0 = time.perf_counter()
    if init is None:
        I, J, _ = lasso_seed(X, y, lam, opts.eps_act)
    else:
        I, J = init
    t_init = time.perf_counter() - t0
    session = DantzigSession(X, y, lam, I, J, opts.max_pivots)
    status, sol, trace, pivots = generate(session, opts)
    if status is not Status.OPTIMAL:
        log.warning("generation stopped with status %s", status.value)
    return session.result(status, sol, trace, pivots,
                          time.perf_counter() - t0, t_init)


def solve_ds_path(X, y, lambdas, opts=None, **overrides):
    """Dantzig selector over a strictly decreasing grid.

    The Lasso is solved once at the smallest ``lam`` to seed the working
    sets; each later ``lam`` reuses the previous sets and basis.
    """
    opts = _options(opts, overrides)
    lambdas = np.asarray(lambdas, dtype=np.float64).ravel()
    if lambdas.size == 0:
        raise ValueError("lambda grid is empty")
    if np.any(np.diff(lambdas) >= 0) or np.any(lambdas < 0):
        raise ValueError("lambda grid must be nonnegative and strictly decreasing")
    X = as_csc(X)
    y = np.asarray(y, dtype=np.float64)
    t0 = time.perf_counter()
    I, J, _ = lasso_seed(X, y, lambdas[-1], opts.eps_act)
    t_init = time.perf_counter() - t0
    session = DantzigSession(X, y, lambdas[0], I, J, opts.max_pivots)
    out = []
    for k, lam in enumerate(lambdas):
        t1 = time.perf_counter()
        if k:
            session.set_lambda(lam)
        status, sol, trace, pivots = generate(session, opts)
        out.append(session.result(status, sol, trace, pivots, time.perf_counter() - t1,
                                  t_init if k == 0 else 0.0))
    return out


def full_lp(X, y, lam, max_pivots=simplex.MAX_PIVOTS):
    """The complete LP (``I = J = [p]``) solved directly, without generation."""
    X = as_csc(X)
    p = X.shape[1]
    opts = DSOptions(generate_rows=False, generate_cols=False, polish=False,
                     max_pivots=max_pivots)
    return solve_ds(X, y, lam, opts, init=(np.arange(p), np.arange(p)))
