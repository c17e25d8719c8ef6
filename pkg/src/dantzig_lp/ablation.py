"""Solver variants for the component ablation and the benchmark harness.

Variants (all solve the same l1 Dantzig selector LP):

``full``              every row and column present, no generation
``lasso_init_cg_cc``  Lasso-seeded column and constraint generation
``random_init``       ``I = J`` = a random subset of size ``||beta0||_0``
``constraint_only``   ``I`` from the Lasso, ``J = [p]``; only rows are generated
``column_only``       ``J`` from the Lasso, ``I = [p]``; only columns are generated
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
import os
import time

import numpy as np

from .dantzig import DSOptions, full_lp, lasso_seed, solve_ds
from .data import STREAM_ABLATION, gen_ds_instance, stream
from .simplex import Status
from .sparse import as_csc

VARIANTS = ("full", "lasso_init_cg_cc", "random_init", "constraint_only", "column_only")


@dataclass
class RunResult:
    variant: str
    lam: float
    lambdas: list
    objective: float
    dual_bound: float
    support_size: int
    max_constraint_violation: float
    max_column_violation: float
    outer_iterations: int
    n_rows: int
    n_cols: int
    pivots: int
    seconds: float
    status: str
    instance: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)

    def as_dict(self):
        return asdict(self)


def result_from_solution(sol, variant, lambdas=(), instance=None, with_trace=False):
    return RunResult(
        variant=variant, lam=float(sol.lam), lambdas=[float(v) for v in lambdas],
        objective=float(sol.objective), dual_bound=float(sol.dual_bound),
        support_size=int(np.count_nonzero(sol.beta)),
        max_constraint_violation=float(sol.max_constraint_violation),
        max_column_violation=float(sol.max_column_violation),
        outer_iterations=len(sol.trace), n_rows=int(sol.I.size), n_cols=int(sol.J.size),
        pivots=int(sol.pivots), seconds=float(sol.seconds), status=sol.status.value,
        instance=dict(instance or {}),
        trace=[t.as_dict() for t in sol.trace] if with_trace else [])


def random_subset(seed, p, k):
    return np.sort(stream(seed, STREAM_ABLATION).choice(p, size=min(k, p), replace=False))


def solve_variant(X, y, lam, variant, opts=None, *, support_size=1, seed=0):
    """Solve one ``(instance, lam)`` cell with the given variant."""
    opts = DSOptions() if opts is None else opts
    X = as_csc(X)
    p = X.shape[1]
    allp = np.arange(p)
    if variant == "full":
        return full_lp(X, y, lam, opts.max_pivots)
    if variant == "lasso_init_cg_cc":
        return solve_ds(X, y, lam, opts)
    if variant == "random_init":
        S = random_subset(seed, p, max(support_size, 1))
        return solve_ds(X, y, lam, opts, init=(S, S))
    t0 = time.perf_counter()
    I, J, _ = lasso_seed(X, y, lam, opts.eps_act)
    t_init = time.perf_counter() - t0
    if variant == "constraint_only":
        sol = solve_ds(X, y, lam, opts, init=(I, allp), generate_cols=False)
    elif variant == "column_only":
        sol = solve_ds(X, y, lam, opts, init=(allp, J), generate_rows=False)
    else:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    sol.seconds += t_init
    sol.init_seconds += t_init
    return sol


def run_ablation(instance, variant, lambdas=None, opts=None):
    """Run ``variant`` on an instance for each ``lam``; returns a list of RunResult.

    ``instance`` is an :class:`InstanceSpec` or a ``(spec, (X, y, beta0, e0))``
    pair.  The default ``lam`` is ``2 ||X^T e0||_inf``.
    """
    if isinstance(instance, tuple):
        spec, (X, y, beta0, e0) = instance
    else:
        spec = instance
        X, y, beta0, e0 = gen_ds_instance(spec)
    X = as_csc(X)
    if lambdas is None:
        lambdas = [2.0 * float(np.max(np.abs(X.T @ e0)))]
    lambdas = [float(v) for v in lambdas]
    out = []
    for lam in lambdas:
        sol = solve_variant(X, y, lam, variant, opts,
                            support_size=int(np.count_nonzero(beta0)), seed=spec.seed)
        out.append(result_from_solution(sol, variant, lambdas, spec.as_dict()))
    return out


def thread_count():
    """Harness parallelism, capped by ``DANTZIG_LP_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("DANTZIG_LP_THREADS", "1")))
    except ValueError:
        return 1


def run_bench(specs, variants=VARIANTS, lambdas=None, opts=None, threads=None):
    """Every (instance, variant) cell, run in parallel up to ``threads``.

    Results are sorted by ``(seed, variant order, lam descending)`` so the
    output does not depend on scheduling.
    """
    threads = thread_count() if threads is None else threads
    cells = [(spec, v) for spec in specs for v in variants]
    data = {id(spec): (spec, gen_ds_instance(spec)) for spec in specs}

    def work(cell):
        spec, v = cell
        return run_ablation(data[id(spec)], v, lambdas, opts)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            chunks = list(pool.map(work, cells))
    else:
        chunks = [work(c) for c in cells]
    results = [r for chunk in chunks for r in chunk]
    order = {v: k for k, v in enumerate(VARIANTS)}
    results.sort(key=lambda r: (r.instance.get("seed", 0), r.instance.get("n", 0),
                                r.instance.get("p", 0), order.get(r.variant, 99), -r.lam))
    return results


def all_optimal(results):
    return all(r.status == Status.OPTIMAL.value for r in results)
