"""Command line entry point: ``dantzig-lp {gen,ds,bp,fused,bench}``.

Results are written as one JSON document with ``"schema_version": 1``.
Exit status: 0 when every solve is optimal, 2 when any hits the iteration
limit, 1 on input errors.
"""
import argparse
import json
import logging
import sys

import numpy as np

from . import data as datamod
from .ablation import VARIANTS, RunResult, result_from_solution, run_bench, solve_variant
from .basis_pursuit import BpOptions, solve_bp
from .dantzig import DSOptions, solve_ds_path
from .errors import DantzigLPError
from .fused_dantzig import FusedOptions, projected_data, solve_fused_regression, solve_fused_signal
from .simplex import Status

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _instance_flags(p, kinds=None):
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--p", type=int, default=1000)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--pi", type=float, default=0.0)
    p.add_argument("--snr", type=float, default=10.0)
    p.add_argument("--support", type=int, default=None, help="nonzeros in beta0")
    p.add_argument("--knots", type=int, default=None, help="knot count (fused)")
    p.add_argument("--seed", type=int, default=0)
    if kinds:
        p.add_argument("--kind", choices=kinds, default=kinds[0])


def _input_flags(p):
    p.add_argument("--in-x", help="Matrix Market file with X")
    p.add_argument("--in-y", help="CSV file with y, one value per line")


def _solver_flags(p, batch=True):
    p.add_argument("--eps", type=float, default=1e-4, help="violation tolerance")
    if batch:
        p.add_argument("--col-batch", type=int, default=None)
        p.add_argument("--row-batch", type=int, default=None)
    p.add_argument("--max-outer", type=int, default=500)


def _lambda_flags(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--lambda", dest="lam", type=float, action="append",
                   help="single lambda (repeatable)")
    g.add_argument("--lambda-grid", help="COUNT:MIN:MAX, MIN/MAX may be 'auto'")
    g.add_argument("--tau", type=float, help="lambda = tau * ||X^T e0||_inf")


def build_parser():
    parser = _Parser(prog="dantzig-lp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a synthetic instance")
    _instance_flags(p, list(datamod.KINDS))
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("ds", help="l1 Dantzig selector")
    _instance_flags(p)
    _input_flags(p)
    _lambda_flags(p)
    _solver_flags(p)
    p.add_argument("--variant", choices=VARIANTS + ("path",), default="path")
    p.add_argument("--out", help="JSON results file (default: stdout)")

    p = sub.add_parser("bp", help="basis pursuit")
    _instance_flags(p)
    _input_flags(p)
    _solver_flags(p)
    p.add_argument("--out")

    p = sub.add_parser("fused", help="fused Dantzig selector")
    _instance_flags(p, ["fused_signal", "fused_regression"])
    _input_flags(p)
    _lambda_flags(p)
    _solver_flags(p)
    p.add_argument("--out")

    p = sub.add_parser("bench", help="ablation harness over seeds and variants")
    _instance_flags(p)
    _lambda_flags(p)
    _solver_flags(p)
    p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
    p.add_argument("--variant", action="append", choices=VARIANTS,
                   help="variant to run (repeatable; default: all)")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out")
    return parser


def _spec(args, kind):
    try:
        return datamod.InstanceSpec(kind=kind, n=args.n, p=args.p, rho=args.rho, pi=args.pi,
                                    snr=args.snr, support=args.support,
                                    knot_count=args.knots, seed=args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _load(args, kind, need_x=True):
    """``(spec_dict, X, y, e0)`` from files or a generated instance."""
    if args.in_x or args.in_y:
        if need_x and not args.in_x:
            raise InputError("--in-y requires --in-x")
        if not args.in_y:
            raise InputError("--in-x requires --in-y")
        try:
            X = datamod.read_matrix(args.in_x) if args.in_x else None
            y = datamod.read_vector(args.in_y)
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read input: {exc}") from exc
        if X is not None and X.shape[0] != y.size:
            raise InputError(f"X has {X.shape[0]} rows but y has {y.size} values")
        return {"in_x": args.in_x, "in_y": args.in_y}, X, y, None
    spec = _spec(args, kind)
    inst = datamod.generate_instance(spec)
    return spec.as_dict(), inst.get("X"), inst["y"], inst.get("e0")


def _parse_grid(text, auto_min, auto_max):
    try:
        count, lo, hi = text.split(":")
        count = int(count)
        lo = auto_min() if lo == "auto" else float(lo)
        hi = auto_max() if hi == "auto" else float(hi)
    except ValueError as exc:
        raise InputError(f"bad --lambda-grid {text!r}; expected COUNT:MIN:MAX") from exc
    return datamod.log_grid(lo, hi, count)


def _lambdas(args, auto_min, auto_max, xte):
    if args.lam:
        return sorted(set(args.lam), reverse=True)
    if args.tau is not None:
        if xte is None:
            raise InputError("--tau needs a generated instance (e0 unknown for file input)")
        return [args.tau * xte()]
    if args.lambda_grid:
        return list(_parse_grid(args.lambda_grid, auto_min, auto_max))
    return None


def _gen_opts(cls, args, **extra):
    kw = dict(eps=args.eps, max_outer=args.max_outer, **extra)
    if getattr(args, "col_batch", None):
        kw["col_batch"] = args.col_batch
    if getattr(args, "row_batch", None):
        kw["row_batch"] = args.row_batch
    return cls(**kw)


def cmd_gen(args):
    spec = _spec(args, args.kind)
    inst = datamod.generate_instance(spec)
    paths = datamod.save_instance(args.out, inst)
    return EXIT_OK, {"command": "gen", "instance": spec.as_dict(), "files": paths}


def _ds_anchors(X, y, e0):
    def xte():
        if e0 is None:
            raise InputError("'auto' lambda_min needs a generated instance")
        return float(np.max(np.abs(X.T @ e0)))
    return (lambda: 2.0 * xte()), (lambda: float(np.max(np.abs(X.T @ y)))), xte


def cmd_ds(args):
    instance, X, y, e0 = _load(args, "ds")
    auto_min, auto_max, xte = _ds_anchors(X, y, e0)
    lambdas = _lambdas(args, auto_min, auto_max, xte) or [auto_min()]
    opts = _gen_opts(DSOptions, args)
    if args.variant == "path":
        sols = solve_ds_path(X, y, lambdas, opts)
    else:
        k = datamod.InstanceSpec(**instance).support_size if "kind" in instance else 1
        sols = [solve_variant(X, y, lam, args.variant, opts, support_size=k,
                              seed=int(instance.get("seed", 0))) for lam in lambdas]
    results = [result_from_solution(s, args.variant, lambdas, instance, with_trace=True)
               for s in sols]
    return _status(results), {"command": "ds", "results": [r.as_dict() for r in results]}


def cmd_bp(args):
    instance, X, y, _ = _load(args, "bp")
    sol = solve_bp(X, y, _gen_opts(BpOptions, args))
    res = RunResult(
        variant="bp", lam=0.0, lambdas=[], objective=sol.objective,
        dual_bound=sol.dual_objective, support_size=int(np.count_nonzero(sol.beta)),
        max_constraint_violation=sol.residual, max_column_violation=sol.max_column_violation,
        outer_iterations=len(sol.trace), n_rows=int(X.shape[0]), n_cols=int(sol.J.size),
        pivots=sol.pivots, seconds=sol.seconds, status=sol.status.value, instance=instance,
        trace=[t.as_dict() for t in sol.trace])
    return _status([res]), {"command": "bp", "results": [res.as_dict()]}


def cmd_fused(args):
    regression = args.kind == "fused_regression" or bool(args.in_x)
    instance, X, y, _ = _load(args, "fused_regression" if regression else "fused_signal",
                              need_x=False)
    if regression:
        proj = projected_data(X, y)
        lam_max = float(np.max(np.abs(proj.X.T @ proj.y))) if proj.X.size else 0.0
    else:
        g = np.cumsum((y - y.mean())[::-1])[::-1]
        lam_max = float(np.max(np.abs(g[1:]))) if y.size > 1 else 0.0
    lambdas = _lambdas(args, lambda: 1e-3 * lam_max, lambda: lam_max, None)
    if lambdas is None:
        raise InputError("fused needs --lambda or --lambda-grid")
    sols = []
    for lam in lambdas:
        if regression:
            sols.append(solve_fused_regression(X, y, lam, _gen_opts(DSOptions, args)))
        else:
            sols.append(solve_fused_signal(y, lam, _gen_opts(FusedOptions, args)))
    tag = "fused_regression" if regression else "fused_signal"
    results = [result_from_solution(s, tag, lambdas, instance, with_trace=True) for s in sols]
    return _status(results), {"command": "fused", "results": [r.as_dict() for r in results]}


def cmd_bench(args):
    base = _spec(args, "ds").as_dict()
    specs = [datamod.InstanceSpec(**{**base, "seed": args.seed + k}) for k in range(args.seeds)]
    lambdas = None
    if args.lam:
        lambdas = sorted(set(args.lam), reverse=True)
    elif args.tau is not None or args.lambda_grid:
        raise InputError("bench accepts --lambda only; the default is 2 ||X^T e0||_inf")
    variants = tuple(args.variant) if args.variant else VARIANTS
    results = run_bench(specs, variants, lambdas, _gen_opts(DSOptions, args), args.threads)
    return _status(results), {"command": "bench", "results": [r.as_dict() for r in results]}


def _status(results):
    statuses = {r.status for r in results}
    if statuses <= {Status.OPTIMAL.value}:
        return EXIT_OK
    if Status.ITERATION_LIMIT.value in statuses:
        return EXIT_LIMIT
    return EXIT_INPUT


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _clean(obj):
    """NaN and infinities become null so the document is strict JSON."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


COMMANDS = {"gen": cmd_gen, "ds": cmd_ds, "bp": cmd_bp, "fused": cmd_fused, "bench": cmd_bench}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        code, doc = COMMANDS[args.command](args)
    except (InputError, DantzigLPError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"dantzig-lp: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    doc = _clean({"schema_version": SCHEMA_VERSION, **doc})
    text = json.dumps(doc, indent=2, default=_json_default)
    out = getattr(args, "out", None)
    if out and args.command != "gen":
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
