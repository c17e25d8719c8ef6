"""Column generation for Basis Pursuit, ``min ||b||_1  s.t.  X b = y``.

The restricted problem keeps every equality row and only the columns ``J``::

    min  sum(b+_J + b-_J)   s.t.  X_J (b+_J - b-_J) = y,   b+, b- >= 0

Its duals ``v`` price the excluded columns through ``|X_j^T v| > 1 + eps``.
The starting ``J`` must already span ``y`` so that every restriction is
feasible; :func:`bp_init_columns` finds one by a Lasso continuation.
"""
from dataclasses import dataclass, field
import logging
import time

import numpy as np
import scipy.sparse as sp

from . import simplex
from .errors import InitInfeasible
from .generation import GenerationOptions, generate, rank_violations
from .lasso import lasso_fit
from .simplex import Basis, Status
from .sparse import as_csc

log = logging.getLogger(__name__)

SPAN_RTOL = 1e-8
CONTINUATION_STEPS = 30


@dataclass
class BpOptions(GenerationOptions):
    max_pivots: int = simplex.MAX_PIVOTS

    def __post_init__(self):
        self.generate_rows = False


@dataclass
class BpSolution:
    beta: np.ndarray
    v: np.ndarray
    objective: float
    dual_objective: float
    residual: float
    max_column_violation: float
    status: Status
    J: np.ndarray
    trace: list = field(default_factory=list)
    pivots: int = 0
    seconds: float = 0.0
    init_seconds: float = 0.0


def span_residual(X, y, J):
    """``||y - P_J y||_2`` for the least-squares projection onto ``span(X_J)``."""
    J = np.asarray(J, dtype=np.intp)
    if J.size == 0:
        return float(np.linalg.norm(y)), y.copy()
    XJ = X[:, J].toarray()
    coef = np.linalg.lstsq(XJ, y, rcond=None)[0]
    res = y - XJ @ coef
    return float(np.linalg.norm(res)), res


def _greedy_span(X, y, J, tol):
    """Add columns by largest ``|X_j^T (y - P_J y)|`` until ``y`` is spanned."""
    J = list(J)
    n, p = X.shape
    norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=0)).ravel())
    norms[norms == 0] = np.inf
    res_norm, res = span_residual(X, y, J)
    while res_norm > tol:
        corr = np.abs(X.T @ res) / norms
        if J:
            corr[J] = -np.inf
        j = int(np.argmax(corr))
        if not corr[j] > 1e-12 * res_norm:
            raise InitInfeasible("y is not in the column span of X")
        J.append(j)
        new_norm, res = span_residual(X, y, J)
        if new_norm >= res_norm and len(J) >= min(n, p):
            raise InitInfeasible("y is not in the column span of X")
        res_norm = new_norm
    return np.array(sorted(J), dtype=np.intp)


def bp_init_columns(X, y):
    """A column set ``J`` whose span contains ``y``.

    Runs the Lasso at ``lam_k = ||X^T y||_inf / 2^k`` (k = 1..30, warm
    started) and returns the first support that spans ``y`` to within
    ``1e-8 ||y||_2``.  If none does, the last support is extended greedily.
    """
    X = as_csc(X)
    y = np.asarray(y, dtype=np.float64).ravel()
    ynorm = float(np.linalg.norm(y))
    if ynorm == 0.0:
        return np.empty(0, dtype=np.intp)
    tol = SPAN_RTOL * ynorm
    lam_max = float(np.max(np.abs(X.T @ y))) if X.shape[1] else 0.0
    if lam_max == 0.0:
        raise InitInfeasible("y is orthogonal to every column of X")
    fit = None
    J = np.empty(0, dtype=np.intp)
    for k in range(1, CONTINUATION_STEPS + 1):
        fit = lasso_fit(X, y, lam_max * 2.0 ** -k, fit)
        J = np.flatnonzero(fit.beta)
        if J.size and span_residual(X, y, J)[0] <= tol:
            return J
    log.info("lasso continuation did not span y; extending %d columns greedily", J.size)
    return _greedy_span(X, y, J, tol)


class BpSession:
    def __init__(self, X, y, J, max_pivots=simplex.MAX_PIVOTS):
        self.X = as_csc(X)
        self.y = np.asarray(y, dtype=np.float64)
        self.n, self.p = self.X.shape
        self.J = []
        self.max_pivots = max_pivots
        self.model = simplex.build_model(np.zeros(0), sp.csc_matrix((self.n, 0)),
                                         (self.y, self.y))
        self.basis = Basis.slack(self.model)
        self.plus, self.minus = [], []
        self.sol = None
        if len(J):
            self.add_cols(np.unique(np.asarray(J, dtype=np.intp)))

    def sizes(self):
        return self.n, len(self.J)

    def solve(self):
        self.sol, self.basis = simplex.solve(self.model, self.basis,
                                             max_pivots=self.max_pivots)
        return self.sol

    def beta(self, sol):
        b = np.zeros(self.p)
        if self.J:
            b[self.J] = sol.x[self.plus] - sol.x[self.minus]
        return b

    def row_violations(self, sol, eps):
        return np.empty(0, dtype=np.intp), np.empty(0)

    def col_violations(self, sol, eps):
        return rank_violations(np.abs(self.X.T @ sol.v) - 1.0, eps, None, self.J)

    def repair_columns(self, sol):
        return rank_violations(np.abs(self.X.T @ sol.farkas), 1e-12, None, self.J)

    def add_cols(self, idx):
        idx = np.asarray(idx, dtype=np.intp)
        k = idx.size
        XJ = self.X[:, idx]
        start = self.model.n_cols
        self.model, self.basis = simplex.add_columns(
            self.model, self.basis, sp.hstack([XJ, -XJ], format="csc"), np.ones(2 * k))
        self.plus.extend(range(start, start + k))
        self.minus.extend(range(start + k, start + 2 * k))
        self.J.extend(idx.tolist())

    def result(self, status, sol, trace, pivots, seconds=0.0, init_seconds=0.0):
        beta = self.beta(sol)
        v = sol.v.copy()
        xtv = float(np.max(np.abs(self.X.T @ v))) if self.p else 0.0
        # v / max(1, ||X^T v||) is feasible for the full dual
        bound = float(v @ self.y) / max(1.0, xtv) if status is Status.OPTIMAL else np.nan
        return BpSolution(
            beta=beta, v=v, objective=float(np.abs(beta).sum()), dual_objective=bound,
            residual=float(np.max(np.abs(self.y - self.X @ beta))) if self.n else 0.0,
            max_column_violation=max(xtv - 1.0, 0.0), status=status,
            J=np.array(sorted(self.J), dtype=np.intp), trace=trace, pivots=pivots,
            seconds=seconds, init_seconds=init_seconds)


def solve_bp(X, y, opts=None, *, init=None):
    """Basis Pursuit by column generation.

    ``init`` overrides the starting column set; by default it comes from
    :func:`bp_init_columns`.
    """
    opts = BpOptions() if opts is None else opts
    X = as_csc(X)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] != y.size:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.size} entries")
    t0 = time.perf_counter()
    J = bp_init_columns(X, y) if init is None else np.asarray(init, dtype=np.intp)
    t_init = time.perf_counter() - t0
    session = BpSession(X, y, J, opts.max_pivots)
    status, sol, trace, pivots = generate(session, opts)
    if status is not Status.OPTIMAL:
        log.warning("basis pursuit stopped with status %s", status.value)
    return session.result(status, sol, trace, pivots, time.perf_counter() - t0, t_init)


def full_bp(X, y, max_pivots=simplex.MAX_PIVOTS):
    """BP with every column present from the start (no pricing)."""
    X = as_csc(X)
    opts = BpOptions(generate_cols=False, polish=False, max_pivots=max_pivots)
    return solve_bp(X, y, opts, init=np.arange(X.shape[1]))
