"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/compare_kernels.py [--repeat 5]

Both backends are imported directly, so the environment switch is not
needed.  Outputs are checked for agreement before timing.
"""
import argparse
import time

import numpy as np

from dantzig_lp import _kernels
from dantzig_lp.sparse import as_csc, column_sq_norms


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def case_fused_dp(mod, n, seed=0):
    rng = np.random.default_rng(seed)
    y = np.repeat(rng.standard_normal(20), n // 20) + 0.3 * rng.standard_normal(n // 20 * 20)
    return lambda: mod.fused_dp(y, 0.5)


def case_cd_gram(mod, n, p, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    y = X[:, :5] @ np.ones(5) + rng.standard_normal(n)
    G = np.ascontiguousarray(X.T @ X)
    q0 = X.T @ y
    lam = 0.1 * np.abs(q0).max()

    def run():
        q = q0.copy()
        b = np.zeros(p)
        mod.cd_gram(G, q, b, lam, 1e-10, 10_000)
        return b
    return run


def case_cd_csc(mod, n, p, density, seed=0):
    rng = np.random.default_rng(seed)
    X = as_csc((rng.random((n, p)) < density) * rng.standard_normal((n, p)))
    y = rng.standard_normal(n)
    lam = 0.1 * np.abs(X.T @ y).max()
    indptr, indices = X.indptr.astype(np.int32), X.indices.astype(np.int32)
    colsq = column_sq_norms(X)
    active = np.arange(p, dtype=np.intp)

    def run():
        b = np.zeros(p)
        r = y.copy()
        mod.cd_csc(indptr, indices, X.data, colsq, active, b, r, lam, 1e-10, 10_000)
        return b
    return run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels.compiled is None:
        print("compiled extension not built; only the fallback is available")
        return 1
    cases = [
        ("fused_dp n=10k", lambda m: case_fused_dp(m, 10_000)),
        ("fused_dp n=100k", lambda m: case_fused_dp(m, 100_000)),
        ("cd_gram n=200 p=300", lambda m: case_cd_gram(m, 200, 300)),
        ("cd_csc n=500 p=2000 d=0.05", lambda m: case_cd_csc(m, 500, 2000, 0.05)),
    ]
    print(f"{'kernel':<28}{'cython s':>12}{'python s':>12}{'speedup':>10}")
    for name, make in cases:
        fc, fp = make(_kernels.compiled), make(_kernels.python)
        if not np.allclose(fc(), fp(), rtol=0, atol=1e-9):
            raise SystemExit(f"{name}: backends disagree")
        tc, tp = best_of(fc, args.repeat), best_of(fp, max(1, args.repeat // 2))
        print(f"{name:<28}{tc:>12.4f}{tp:>12.4f}{tp / tc:>10.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
