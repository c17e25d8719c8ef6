"""The outer column-and-constraint generation loop shared by all estimators.

A *session* owns one reduced LP (model + basis) and exposes:

``solve()``
    re-optimize from the current basis, returning an ``LpSolution``;
``row_violations(sol, eps)`` / ``col_violations(sol, eps)``
    ranked ``(indices, amounts)`` of excluded constraints / columns violated
    by more than ``eps``;
``repair_columns(sol)``
    ranked excluded columns that reduce infeasibility of an infeasible
    restriction (from the Farkas row);
``add_rows(idx)`` / ``add_cols(idx)``
    grow the working sets;
``sizes()``
    ``(|I|, |J|)`` for the trace.

Constraints are exhausted before columns are priced.
"""
from dataclasses import dataclass, asdict

import numpy as np

from .simplex import Status

POLISH_EPS = 1e-9


@dataclass
class TraceRecord:
    iteration: int
    n_rows: int
    n_cols: int
    objective: float
    max_row_violation: float
    max_col_violation: float
    added_rows: int
    added_cols: int
    pivots: int

    def as_dict(self):
        return asdict(self)


@dataclass
class GenerationOptions:
    eps: float = 1e-4
    col_batch: int = 30
    row_batch: int = 50
    max_outer: int = 500
    polish: bool = True
    generate_rows: bool = True
    generate_cols: bool = True


def rank_violations(amount, eps, limit, exclude=None):
    """Indices with ``amount > eps`` ranked by amount (ties: lower index first)."""
    amount = np.asarray(amount, dtype=np.float64)
    mask = amount > eps
    if exclude is not None and len(exclude):
        mask[np.asarray(exclude, dtype=np.intp)] = False
    idx = np.flatnonzero(mask)
    order = np.argsort(-amount[idx], kind="stable")
    idx = idx[order]
    if limit is not None:
        idx = idx[:limit]
    return idx, amount[idx]


def generate(session, opts):
    """Run the generation loop; returns ``(status, sol, trace, pivots)``."""
    trace = []
    sol = session.solve()
    pivots = sol.iterations
    eps = opts.eps
    for outer in range(opts.max_outer):
        if sol.status is Status.INFEASIBLE:
            idx, _ = session.repair_columns(sol)
            idx = idx[:opts.col_batch]
            if idx.size == 0:
                return Status.INFEASIBLE, sol, trace, pivots
            session.add_cols(idx)
            sol = session.solve()
            pivots += sol.iterations
            nI, nJ = session.sizes()
            trace.append(TraceRecord(outer, nI, nJ, np.nan, np.nan, np.nan, 0, idx.size,
                                     sol.iterations))
            continue
        if sol.status is not Status.OPTIMAL:
            return sol.status, sol, trace, pivots

        rows = cols = np.empty(0, dtype=np.intp)
        row_amt = col_amt = np.empty(0)
        if opts.generate_rows:
            rows, row_amt = session.row_violations(sol, eps)
            rows = rows[:opts.row_batch]
        if rows.size == 0 and opts.generate_cols:
            cols, col_amt = session.col_violations(sol, eps)
            cols = cols[:opts.col_batch]
        if rows.size == 0 and cols.size == 0:
            if opts.polish and eps > POLISH_EPS:
                eps = POLISH_EPS
                continue
            return Status.OPTIMAL, sol, trace, pivots
        if rows.size:
            session.add_rows(rows)
        else:
            session.add_cols(cols)
        objective = sol.objective
        sol = session.solve()
        pivots += sol.iterations
        nI, nJ = session.sizes()
        trace.append(TraceRecord(
            iteration=outer, n_rows=nI, n_cols=nJ, objective=objective,
            max_row_violation=float(row_amt[0]) if row_amt.size else 0.0,
            # columns are not priced in a round that adds rows
            max_col_violation=float(col_amt[0]) if col_amt.size else
            (np.nan if rows.size else 0.0),
            added_rows=int(rows.size), added_cols=int(cols.size),
            pivots=sol.iterations))
    return Status.ITERATION_LIMIT, sol, trace, pivots
