"""Bounded-variable revised simplex with warm starts and incremental rows/columns.

The computational form is::

    minimize    c^T x
    subject to  row_lo <= A x <= row_hi
                var_lo <= x <= var_hi

Internally every row gets a logical (slack) variable ``s_i = a_i^T x`` carrying
the row bounds, so the working system is ``[A  -I] (x, s) = 0`` with bounds on
all ``n + m`` variables.  The slack basis ``-I`` is always a valid start.

After a solve, :func:`add_columns` keeps the basis primal feasible (new
variables enter nonbasic at a bound) so the next solve runs primal simplex;
:func:`add_rows` makes the new slacks basic, which keeps the basis dual
feasible so the next solve runs dual simplex.  :func:`solve` picks the phase
from the state of the basis it is handed.
"""
from dataclasses import dataclass, field
from enum import Enum
import logging

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DimensionMismatch, InvalidBound, NumericalFailure
from .sparse import as_csc

log = logging.getLogger(__name__)

BASIC, AT_LOWER, AT_UPPER, AT_ZERO = 0, 1, 2, 3

TOL_PRIMAL = 1e-9
TOL_DUAL = 1e-9
TOL_PIVOT = 1e-10
REFACTOR_EVERY = 100
BLAND_AFTER = 500
MAX_PIVOTS = 200_000
DENSE_LU_MAX = 1500


class Status(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


@dataclass
class LpModel:
    c: np.ndarray
    A: sp.csc_matrix
    row_lo: np.ndarray
    row_hi: np.ndarray
    var_lo: np.ndarray
    var_hi: np.ndarray

    @property
    def n_rows(self):
        return self.A.shape[0]

    @property
    def n_cols(self):
        return self.A.shape[1]


@dataclass
class Basis:
    """Basic head plus nonbasic status of every variable.

    ``head[k] >= 0`` names structural column ``head[k]``; ``head[k] < 0`` names
    the slack of row ``-1 - head[k]``.  ``factor`` caches the factorization of
    the basis matrix from the last solve; it is reused only while the basis
    matrix is untouched (column additions, bound changes).
    """

    head: np.ndarray
    col_status: np.ndarray
    row_status: np.ndarray
    factor: object = field(default=None, repr=False, compare=False)

    @classmethod
    def slack(cls, model):
        m, n = model.n_rows, model.n_cols
        col_status = np.array([_resting_status(lo, hi) for lo, hi
                               in zip(model.var_lo, model.var_hi)], dtype=np.int8)
        return cls(head=-1 - np.arange(m), col_status=col_status,
                   row_status=np.zeros(m, dtype=np.int8))

    def copy(self):
        return Basis(self.head.copy(), self.col_status.copy(), self.row_status.copy(),
                     self.factor)

    def signature(self):
        return (tuple(sorted(self.head.tolist())),
                self.col_status.tobytes() + self.row_status.tobytes())


@dataclass
class LpSolution:
    status: Status
    x: np.ndarray
    v: np.ndarray
    reduced_costs: np.ndarray
    objective: float
    dual_objective: float
    row_activity: np.ndarray
    iterations: int = 0
    phase_iterations: dict = field(default_factory=dict)
    farkas: np.ndarray = None


def _resting_status(lo, hi):
    if np.isfinite(lo):
        return AT_LOWER
    if np.isfinite(hi):
        return AT_UPPER
    return AT_ZERO


def _as_bounds(bounds, size, what):
    lo, hi = bounds
    lo = np.broadcast_to(np.asarray(lo, dtype=np.float64), (size,)).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=np.float64), (size,)).copy()
    if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
        raise InvalidBound(f"NaN in {what} bounds")
    if np.any(lo > hi):
        k = int(np.argmax(lo > hi))
        raise InvalidBound(f"{what} {k}: lower bound {lo[k]} exceeds upper bound {hi[k]}")
    if np.any(lo == np.inf) or np.any(hi == -np.inf):
        raise InvalidBound(f"{what} bound is infinite on the wrong side")
    return lo, hi


def build_model(c, A, row_bounds, var_bounds=(0.0, np.inf)):
    """Validate the data and return an :class:`LpModel`; nothing is solved."""
    A = as_csc(A)
    c = np.asarray(c, dtype=np.float64).ravel()
    m, n = A.shape
    if c.shape[0] != n:
        raise DimensionMismatch(f"c has {c.shape[0]} entries, A has {n} columns")
    if any(np.size(b) not in (1, m) for b in row_bounds):
        raise DimensionMismatch("row bounds do not match the number of rows")
    if any(np.size(b) not in (1, n) for b in var_bounds):
        raise DimensionMismatch("variable bounds do not match the number of columns")
    row_lo, row_hi = _as_bounds(row_bounds, m, "row")
    var_lo, var_hi = _as_bounds(var_bounds, n, "variable")
    return LpModel(c, A, row_lo, row_hi, var_lo, var_hi)


def add_columns(model, basis, cols, c, var_bounds=(0.0, np.inf)):
    """Append columns; the new variables enter nonbasic at a bound.

    ``cols`` is an ``m x k`` matrix.  Returns ``(model, basis)``.
    """
    cols = as_csc(cols)
    if cols.shape[0] != model.n_rows:
        raise DimensionMismatch(f"new columns have {cols.shape[0]} rows, model has {model.n_rows}")
    k = cols.shape[1]
    c = np.broadcast_to(np.asarray(c, dtype=np.float64), (k,))
    lo, hi = _as_bounds(var_bounds, k, "variable")
    new = LpModel(
        c=np.concatenate([model.c, c]),
        A=sp.hstack([model.A, cols], format="csc"),
        row_lo=model.row_lo, row_hi=model.row_hi,
        var_lo=np.concatenate([model.var_lo, lo]),
        var_hi=np.concatenate([model.var_hi, hi]),
    )
    if basis is None:
        return new, None
    status = np.array([_resting_status(a, b) for a, b in zip(lo, hi)], dtype=np.int8)
    nb = Basis(basis.head.copy(), np.concatenate([basis.col_status, status]),
               basis.row_status.copy(), basis.factor)
    return new, nb


def add_rows(model, basis, rows, row_bounds):
    """Append rows ``lo <= rows @ x <= hi``; each new row gets a basic slack.

    ``rows`` is a ``k x n`` matrix.  Returns ``(model, basis)``.
    """
    rows = sp.csr_matrix(rows, dtype=np.float64)
    if rows.shape[1] != model.n_cols:
        raise DimensionMismatch(f"new rows have {rows.shape[1]} columns, model has {model.n_cols}")
    k = rows.shape[0]
    lo, hi = _as_bounds(row_bounds, k, "row")
    new = LpModel(
        c=model.c,
        A=as_csc(sp.vstack([model.A, rows], format="csc")),
        row_lo=np.concatenate([model.row_lo, lo]),
        row_hi=np.concatenate([model.row_hi, hi]),
        var_lo=model.var_lo, var_hi=model.var_hi,
    )
    if basis is None:
        return new, None
    m = model.n_rows
    nb = Basis(np.concatenate([basis.head, -1 - np.arange(m, m + k)]),
               basis.col_status.copy(),
               np.concatenate([basis.row_status, np.zeros(k, dtype=np.int8)]))
    return new, nb


def set_row_bounds(model, rows, row_bounds):
    """Return a model with new bounds on ``rows``; any basis for it stays valid."""
    rows = np.asarray(rows, dtype=np.intp)
    lo, hi = _as_bounds(row_bounds, rows.size, "row")
    row_lo, row_hi = model.row_lo.copy(), model.row_hi.copy()
    row_lo[rows], row_hi[rows] = lo, hi
    return LpModel(model.c, model.A, row_lo, row_hi, model.var_lo, model.var_hi)


def format_lp(model):
    """Plain-text dump, one constraint per line (debugging aid)."""
    lines = ["minimize " + " ".join(f"{v:+.17g} x{j}" for j, v in enumerate(model.c) if v)]
    A = model.A.tocsr()
    for i in range(model.n_rows):
        s, e = A.indptr[i], A.indptr[i + 1]
        terms = " ".join(f"{v:+.17g} x{j}" for j, v in zip(A.indices[s:e], A.data[s:e]))
        lines.append(f"r{i}: {model.row_lo[i]:.17g} <= {terms or '0'} <= {model.row_hi[i]:.17g}")
    for j in range(model.n_cols):
        lines.append(f"bound x{j}: {model.var_lo[j]:.17g} <= x{j} <= {model.var_hi[j]:.17g}")
    return "\n".join(lines) + "\n"


class _SingularBasis(Exception):
    pass


class _Factor:
    """LU of the basis matrix plus a product-form eta file."""

    def __init__(self, B):
        self.m = B.shape[0]
        self.etas = []
        self.key = None
        if self.m == 0:
            self.kind = "empty"
        elif self.m <= DENSE_LU_MAX:
            self.kind = "dense"
            Bd = B.toarray()
            with np.errstate(all="ignore"):
                self.lu = la.lu_factor(Bd, check_finite=False)
            diag = np.abs(np.diag(self.lu[0]))
            scale = max(1.0, float(np.abs(Bd).max()))
            if not np.all(np.isfinite(diag)) or diag.min() <= 1e-11 * scale:
                raise _SingularBasis
        else:
            self.kind = "sparse"
            try:
                self.lu = spla.splu(sp.csc_matrix(B), permc_spec="COLAMD")
            except RuntimeError as exc:
                raise _SingularBasis from exc
            diag = np.abs(self.lu.U.diagonal())
            if diag.min() <= 1e-11 * max(1.0, diag.max()):
                raise _SingularBasis

    def _solve(self, b, trans):
        if self.kind == "empty":
            return b.copy()
        if self.kind == "dense":
            return la.lu_solve(self.lu, b, trans=trans, check_finite=False)
        return self.lu.solve(b, trans="T" if trans else "N")

    def ftran(self, a):
        z = self._solve(a, 0)
        for r, eta in self.etas:
            zr = z[r]
            if zr != 0.0:
                z += zr * eta
        return z

    def btran(self, c):
        w = np.array(c, dtype=np.float64)
        for r, eta in reversed(self.etas):
            w[r] = w[r] + eta @ w
        return self._solve(w, 1)

    def update(self, r, alpha):
        # eta stores the pivot column of E minus e_r
        eta = -alpha / alpha[r]
        eta[r] = 1.0 / alpha[r] - 1.0
        self.etas.append((r, eta))


class _Simplex:
    def __init__(self, model, basis, max_pivots, pricing, track_bases):
        self.model = model
        m, n = model.n_rows, model.n_cols
        self.m, self.n = m, n
        self.A = sp.hstack([model.A, -sp.identity(m, format="csc")], format="csc")
        self.AT = self.A.T.tocsr()
        self.cost = np.concatenate([model.c, np.zeros(m)])
        self.lo = np.concatenate([model.var_lo, model.row_lo])
        self.hi = np.concatenate([model.var_hi, model.row_hi])
        self.fixed = self.lo == self.hi
        self.max_pivots = max_pivots
        self.bland = pricing == "bland"
        self.pivots = 0
        self.degenerate = 0
        self.phase_pivots = {"primal1": 0, "primal2": 0, "dual": 0}
        self.seen = set() if track_bases else None
        self.farkas = None
        self._load(basis)

    # -- basis bookkeeping -------------------------------------------------
    def _load(self, basis):
        m, n = self.m, self.n
        if basis is None:
            basis = Basis.slack(self.model)
        if basis.head.shape[0] != m or basis.col_status.shape[0] != n \
                or basis.row_status.shape[0] != m:
            raise DimensionMismatch("warm basis does not match the model dimensions")
        head = np.where(basis.head >= 0, basis.head, n + (-1 - basis.head)).astype(np.intp)
        status = np.concatenate([basis.col_status, basis.row_status]).astype(np.int8)
        status[head] = BASIC
        self.head = head
        self.status = status
        self._normalize_nonbasic()
        factor = basis.factor
        key = getattr(factor, "key", None)
        if factor is not None and key is not None and factor.m == m \
                and np.array_equal(key, basis.head):
            self.factor = factor
            factor.key = None
        else:
            self._refactor_or_repair()
        self._set_nonbasic_values()
        self._recompute_xb()
        if self.seen is not None:
            self.seen.add(self._signature())

    def _normalize_nonbasic(self):
        st, lo, hi = self.status, self.lo, self.hi
        nb = st != BASIC
        fin_lo, fin_hi = np.isfinite(lo), np.isfinite(hi)
        bad_lo = nb & (st == AT_LOWER) & ~fin_lo
        bad_hi = nb & (st == AT_UPPER) & ~fin_hi
        bad_zero = nb & (st == AT_ZERO) & (fin_lo | fin_hi)
        for mask in (bad_lo, bad_hi, bad_zero):
            for j in np.flatnonzero(mask):
                st[j] = _resting_status(lo[j], hi[j])

    def _set_nonbasic_values(self):
        st = self.status
        x = np.zeros(self.n + self.m)
        x[st == AT_LOWER] = self.lo[st == AT_LOWER]
        x[st == AT_UPPER] = self.hi[st == AT_UPPER]
        self.x = x

    def _refactor(self):
        B = self.A[:, self.head]
        self.factor = _Factor(B)

    def _refactor_or_repair(self):
        try:
            self._refactor()
            return
        except _SingularBasis:
            log.debug("warm basis singular; falling back to slack basis")
        # structural basics become nonbasic at their resting status
        for j in self.head:
            self.status[j] = _resting_status(self.lo[j], self.hi[j])
        self.head = np.arange(self.n, self.n + self.m, dtype=np.intp)
        self.status[self.head] = BASIC
        try:
            self._refactor()
        except _SingularBasis as exc:
            raise NumericalFailure("slack basis could not be factorized") from exc

    def _maybe_refactor(self):
        if len(self.factor.etas) >= REFACTOR_EVERY:
            try:
                self._refactor()
            except _SingularBasis:
                self._refactor_or_repair()
                self._set_nonbasic_values()
            self._recompute_xb()

    def _recompute_xb(self):
        x = self.x
        x[self.head] = 0.0
        rhs = -(self.A @ x)
        x[self.head] = self.factor.ftran(rhs)

    def _column(self, j):
        z = np.zeros(self.m)
        s, e = self.A.indptr[j], self.A.indptr[j + 1]
        z[self.A.indices[s:e]] = self.A.data[s:e]
        return z

    def _duals(self, cost_b):
        y = self.factor.btran(cost_b)
        return y

    def _reduced(self, cost, y):
        d = cost - self.AT @ y
        d[self.head] = 0.0
        return d

    def _infeasibility(self):
        xb = self.x[self.head]
        below = self.lo[self.head] - xb
        above = xb - self.hi[self.head]
        return below, above

    def _pivot(self, r, q, alpha):
        self.factor.update(r, alpha)
        self.head[r] = q
        self.status[q] = BASIC
        self.pivots += 1
        self._record()

    def _signature(self):
        # a vertex is fixed by the basic set plus the bound each nonbasic sits at
        return tuple(sorted(self.head.tolist())), self.status.tobytes()

    def _record(self):
        if self.seen is not None:
            sig = self._signature()
            if sig in self.seen:
                raise AssertionError("basis repeated within a solve")
            self.seen.add(sig)

    def _degenerate_step(self, theta):
        if theta <= 1e-12:
            self.degenerate += 1
            if self.degenerate >= BLAND_AFTER:
                self.bland = True

    # -- primal simplex ----------------------------------------------------
    def primal(self, phase1):
        """Return 'optimal', 'infeasible', 'unbounded' or 'limit'."""
        key = "primal1" if phase1 else "primal2"
        while True:
            if self.pivots >= self.max_pivots:
                return "limit"
            self._maybe_refactor()
            if phase1:
                below, above = self._infeasibility()
                cb = np.where(below > TOL_PRIMAL, -1.0,
                              np.where(above > TOL_PRIMAL, 1.0, 0.0))
                if not cb.any():
                    return "optimal"
                y = self._duals(cb)
                d = -(self.AT @ y)
                d[self.head] = 0.0
            else:
                y = self._duals(self.cost[self.head])
                d = self._reduced(self.cost, y)
            q = self._price(d)
            if q < 0:
                if phase1:
                    self.farkas = y
                    return "infeasible"
                return "optimal"
            sigma = 1.0 if d[q] < 0 else -1.0
            alpha = self.factor.ftran(self._column(q))
            r, theta, to_upper = self._ratio(alpha, sigma, phase1, q)
            if r == -2:
                return "unbounded"
            self._degenerate_step(theta)
            self.x[q] += sigma * theta
            self.x[self.head] -= sigma * theta * alpha
            if r == -1:
                self.status[q] = AT_UPPER if sigma > 0 else AT_LOWER
                self.x[q] = self.hi[q] if sigma > 0 else self.lo[q]
                self.pivots += 1
                self.phase_pivots[key] += 1
                self._record()
                continue
            p = self.head[r]
            self.status[p] = AT_UPPER if to_upper else AT_LOWER
            self.x[p] = self.hi[p] if to_upper else self.lo[p]
            self._pivot(r, q, alpha)
            self.phase_pivots[key] += 1

    def _price(self, d):
        st = self.status
        movable = ~self.fixed
        elig = np.flatnonzero(
            movable & (((st == AT_LOWER) & (d < -TOL_DUAL))
                       | ((st == AT_UPPER) & (d > TOL_DUAL))
                       | ((st == AT_ZERO) & (np.abs(d) > TOL_DUAL))))
        if elig.size == 0:
            return -1
        if self.bland:
            return int(elig[0])
        return int(elig[np.argmax(np.abs(d[elig]))])

    def _ratio(self, alpha, sigma, phase1, q):
        head = self.head
        xb = self.x[head]
        lo, hi = self.lo[head], self.hi[head]
        rate = -sigma * alpha
        big = np.abs(alpha) > TOL_PIVOT
        dec = big & (rate < 0)
        inc = big & (rate > 0)
        theta = np.full(self.m, np.inf)
        to_upper = np.zeros(self.m, dtype=bool)
        if phase1:
            below = xb < lo - TOL_PRIMAL
            above = xb > hi + TOL_PRIMAL
            # decreasing: feasible/above vars stop at lo or hi, vars already below are free
            m1 = dec & ~below & ~above
            theta[m1] = (xb[m1] - lo[m1]) / -rate[m1]
            m2 = dec & above
            theta[m2] = (xb[m2] - hi[m2]) / -rate[m2]
            to_upper[m2] = True
            m3 = inc & ~below & ~above
            theta[m3] = (hi[m3] - xb[m3]) / rate[m3]
            to_upper[m3] = True
            m4 = inc & below
            theta[m4] = (lo[m4] - xb[m4]) / rate[m4]
        else:
            theta[dec] = (xb[dec] - lo[dec]) / -rate[dec]
            theta[inc] = (hi[inc] - xb[inc]) / rate[inc]
            to_upper[inc] = True
        theta = np.maximum(theta, 0.0)
        flip = self.hi[q] - self.lo[q]
        tmin = theta.min() if self.m else np.inf
        if not np.isfinite(tmin) and not np.isfinite(flip):
            return -2, np.inf, False
        if flip <= tmin:
            return -1, flip, False
        ties = np.flatnonzero(theta <= tmin + 1e-12)
        if self.bland:
            r = int(ties[np.argmin(head[ties])])
        else:
            r = int(ties[np.argmax(np.abs(alpha[ties]))])
        return r, float(theta[r]), bool(to_upper[r])

    # -- dual simplex ------------------------------------------------------
    def dual_feasible(self, d):
        st = self.status
        nb = (st != BASIC) & ~self.fixed
        bad = nb & (((st == AT_LOWER) & (d < -TOL_DUAL))
                    | ((st == AT_UPPER) & (d > TOL_DUAL))
                    | ((st == AT_ZERO) & (np.abs(d) > TOL_DUAL)))
        return not bad.any()

    def dual(self):
        """Return 'optimal', 'infeasible', 'lost' (dual feasibility) or 'limit'."""
        m = self.m
        while True:
            if self.pivots >= self.max_pivots:
                return "limit"
            self._maybe_refactor()
            y = self._duals(self.cost[self.head])
            d = self._reduced(self.cost, y)
            if not self.dual_feasible(d):
                return "lost"
            below, above = self._infeasibility()
            infeas = np.maximum(below, above)
            cand = np.flatnonzero(infeas > TOL_PRIMAL)
            if cand.size == 0:
                return "optimal"
            if self.bland:
                r = int(cand[np.argmin(self.head[cand])])
            else:
                r = int(cand[np.argmax(infeas[cand])])
            leave_low = below[r] > TOL_PRIMAL
            e_r = np.zeros(m)
            e_r[r] = 1.0
            rho = self.factor.btran(e_r)
            alpha_r = self.AT @ rho
            st = self.status
            nb = (st != BASIC) & ~self.fixed
            up_ok = (st == AT_LOWER) | (st == AT_ZERO)
            down_ok = (st == AT_UPPER) | (st == AT_ZERO)
            if leave_low:
                elig = nb & ((up_ok & (alpha_r < -TOL_PIVOT)) | (down_ok & (alpha_r > TOL_PIVOT)))
            else:
                elig = nb & ((up_ok & (alpha_r > TOL_PIVOT)) | (down_ok & (alpha_r < -TOL_PIVOT)))
            idx = np.flatnonzero(elig)
            if idx.size == 0:
                self.farkas = -rho if leave_low else rho
                return "infeasible"
            ratios = np.abs(d[idx]) / np.abs(alpha_r[idx])
            tmin = ratios.min()
            ties = idx[ratios <= tmin + 1e-12]
            if self.bland:
                q = int(ties[0])
            else:
                q = int(ties[np.argmax(np.abs(alpha_r[ties]))])
            alpha = self.factor.ftran(self._column(q))
            if abs(alpha[r]) <= TOL_PIVOT or \
                    abs(alpha[r] - alpha_r[q]) > 1e-7 * (1.0 + abs(alpha[r])):
                # row and column disagree: the factorization has drifted
                self._refactor()
                self._recompute_xb()
                continue
            p = self.head[r]
            target = self.lo[p] if leave_low else self.hi[p]
            delta = (self.x[p] - target) / alpha[r]
            self._degenerate_step(abs(d[q]))
            self.x[q] += delta
            self.x[self.head] -= delta * alpha
            self.x[p] = target
            self.status[p] = AT_LOWER if leave_low else AT_UPPER
            self._pivot(r, q, alpha)
            self.phase_pivots["dual"] += 1

    # -- driver ------------------------------------------------------------
    def run(self):
        for _ in range(20):
            below, above = self._infeasibility()
            primal_ok = not ((below > TOL_PRIMAL) | (above > TOL_PRIMAL)).any()
            y = self._duals(self.cost[self.head])
            d = self._reduced(self.cost, y)
            if primal_ok:
                if self.dual_feasible(d):
                    outcome = "optimal"
                else:
                    outcome = self.primal(phase1=False)
            elif self.dual_feasible(d):
                outcome = self.dual()
                if outcome == "lost":
                    continue
            else:
                outcome = self.primal(phase1=True)
                if outcome == "optimal":
                    outcome = self.primal(phase1=False)
            if outcome != "optimal":
                return outcome
            # verify from a fresh factorization before declaring optimality
            self._refactor_or_repair()
            self._recompute_xb()
            below, above = self._infeasibility()
            y = self._duals(self.cost[self.head])
            d = self._reduced(self.cost, y)
            if not ((below > TOL_PRIMAL) | (above > TOL_PRIMAL)).any() and self.dual_feasible(d):
                return "optimal"
        raise NumericalFailure("simplex failed to stabilize after repeated refactorization")

    def solution(self, outcome):
        status = {"optimal": Status.OPTIMAL, "infeasible": Status.INFEASIBLE,
                  "unbounded": Status.UNBOUNDED, "limit": Status.ITERATION_LIMIT}[outcome]
        y = self._duals(self.cost[self.head])
        d = self._reduced(self.cost, y)
        x = self.x[:self.n].copy()
        objective = float(self.model.c @ x)
        return LpSolution(
            status=status,
            x=x,
            v=y,
            reduced_costs=d[:self.n].copy(),
            objective=objective,
            dual_objective=_dual_objective(d, self.lo, self.hi),
            row_activity=self.x[self.n:].copy(),
            iterations=self.pivots,
            phase_iterations=dict(self.phase_pivots),
            farkas=self.farkas if status is Status.INFEASIBLE else None,
        )

    def basis(self):
        n = self.n
        head = np.where(self.head < n, self.head, -1 - (self.head - n))
        head = head.astype(np.intp)
        st = self.status.copy()
        self.factor.key = head.copy()
        return Basis(head, st[:n].copy(), st[n:].copy(), self.factor)


def _dual_objective(d, lo, hi):
    total = 0.0
    pos = d > TOL_DUAL
    neg = d < -TOL_DUAL
    if np.any(pos & ~np.isfinite(lo)) or np.any(neg & ~np.isfinite(hi)):
        return -np.inf
    total += float(d[pos] @ lo[pos])
    total += float(d[neg] @ hi[neg])
    return total


def solve(model, warm_basis=None, *, max_pivots=MAX_PIVOTS, pricing="dantzig",
          track_bases=False):
    """Solve ``model``, optionally warm-started; returns ``(LpSolution, Basis)``.

    ``pricing="bland"`` uses Bland's rule from the first pivot; the default is
    Dantzig pricing with a switch to Bland after 500 degenerate pivots.
    ``track_bases`` records every basis visited and raises ``AssertionError``
    on a repeat (test hook).

    On ``INFEASIBLE`` the solution carries ``farkas``, a row vector ``f`` such
    that raising a new variable with column ``a`` at its lower bound reduces
    the infeasibility when ``a @ f > 0`` (lowering it from an upper bound when
    ``a @ f < 0``).  Column generation uses it to repair infeasible
    restrictions.
    """
    engine = _Simplex(model, warm_basis, max_pivots, pricing, track_bases)
    outcome = engine.run()
    return engine.solution(outcome), engine.basis()
