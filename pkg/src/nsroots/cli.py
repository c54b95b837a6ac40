"""Command-line front end: solve, bench, validate-weights, constants, basin."""

import argparse
import sys
from pathlib import Path

from mpmath import chop, nstr

from . import bench as benchmod
from .basins import BasinConfig, basin_stats, render_basin, stats_row, write_ppm, write_stats_csv
from .driver import RunPolicy, acoc, coc, iterate
from .errors import InsufficientData, ParseError, RootLabError
from .methods import COMPARATORS, MethodId, builtin_weight_pairs, error_constants, validate_weight_pair
from .numeric import Precision, make_complex, make_scalar
from .problems import builtin_suite, get_problem

PROBLEM_IDS = [p.id for p in builtin_suite()]
METHOD_IDS = [m.key for m in MethodId]
PAIR_IDS = [w.id for w in builtin_weight_pairs()]
BASIN_ROSTER = (MethodId.SLSS,) + COMPARATORS


def _parser():
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="nsroots", description=__doc__, formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="iterate one method and print the trace", formatter_class=fmt)
    p.add_argument("--problem", choices=PROBLEM_IDS, default="t1", help="problem id")
    p.add_argument("--method", choices=METHOD_IDS, default="slss", help="method id")
    p.add_argument("--x0", default=None, help="starting point (default: the problem's canonical x0)")
    p.add_argument("--digits", type=int, default=1800, help="working precision in decimal digits")
    p.add_argument("--iters", type=int, default=3, help="maximum number of iterations")
    p.add_argument("--weights", choices=PAIR_IDS, default=None, help="override the weight pair")
    p.add_argument("--residual-tol", default=None, help="stop once |f(x)| falls below this")

    p = sub.add_parser("bench", help="reproduce a benchmark table", formatter_class=fmt)
    p.add_argument("--table", type=int, choices=sorted(benchmod.TABLE_PROBLEMS), default=None,
                   help="benchmark table number")
    p.add_argument("--problem", choices=PROBLEM_IDS[:4], default=None, help="custom problem instead of --table")
    p.add_argument("--methods", default=None, help="comma-separated method ids for --problem")
    p.add_argument("--out", default=None, help="CSV output path")
    p.add_argument("--digits", type=int, default=1800, help="working precision in decimal digits")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for the rows")

    p = sub.add_parser("validate-weights", help="check the weight-function conditions", formatter_class=fmt)
    p.add_argument("--digits", type=int, default=1800, help="working precision in decimal digits")

    p = sub.add_parser("constants", help="print c2, c3, c4, R4, R8 at the known root", formatter_class=fmt)
    p.add_argument("--problem", choices=PROBLEM_IDS[:4], default="t3", help="problem id")
    p.add_argument("--digits", type=int, default=1800, help="working precision in decimal digits")
    p.add_argument("--phi2", default="-2.5", help="phi''(0) entering R4")

    p = sub.add_parser("basin", help="render basins of attraction", formatter_class=fmt)
    p.add_argument("--problem", choices=["b1"], default="b1", help="problem id")
    p.add_argument("--method", choices=METHOD_IDS + ["all"], default="slss",
                   help="'all' renders SLSS and the eight comparators")
    p.add_argument("--out", default=None, help="PPM path ('all': suffixed per method)")
    p.add_argument("--stats", default=None, help="stats CSV path")
    p.add_argument("--figure", default=None, help="PNG figure path (matplotlib)")
    p.add_argument("--grid", type=int, default=256, help="pixels per side")
    p.add_argument("--bounds", type=float, nargs=4, default=[-3.0, 3.0, -3.0, 3.0],
                   metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"), help="region of the complex plane")
    p.add_argument("--maxiter", type=int, default=100, help="iterations before a point is marked black")
    p.add_argument("--tol", type=float, default=1e-3, help="distance to a root that counts as converged")
    p.add_argument("--digits", type=int, default=16, help="working precision (above 16 uses mpmath per pixel)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes over row bands")
    return parser


def _precision(parser, digits):
    try:
        return Precision(digits)
    except ValueError as exc:
        parser.error(str(exc))


def _cmd_solve(args, parser):
    prec = _precision(parser, args.digits)
    problem = get_problem(args.problem)
    method = MethodId.from_key(args.method)
    weights = None
    if args.weights:
        weights = next(w for w in builtin_weight_pairs() if w.id == args.weights)
    try:
        x0 = None
        if args.x0 is not None:
            x0 = make_complex(args.x0, prec) if problem.complex_ok else make_scalar(args.x0, prec)
        tol = None if args.residual_tol is None else make_scalar(args.residual_tol, prec)
    except ParseError as exc:
        parser.error(str(exc))
    if args.iters < 1:
        parser.error("--iters must be >= 1")
    trace = iterate(problem, method, x0, RunPolicy(args.iters, tol), weights, prec)
    print(f"{problem.id}: {problem.description}, method {method.key}, {prec.decimal_digits} digits")
    for n, x in enumerate(trace.iterates):
        err = benchmod.format_error(trace.errors[n]) if trace.errors else ""
        print(f"  x{n} = {nstr(x, 25)}   |x{n}-x*| = {err}")
    print(f"termination: {trace.termination.value}" + (f" ({trace.detail})" if trace.detail else ""))
    print(f"evaluations: f={trace.f_evals} f'={trace.fprime_evals}")
    print(f"efficiency index: {method.order}^(1/{method.evals}) = {method.efficiency_index:.4f}")
    for name, fn in (("COC", lambda: coc(trace)), ("ACOC", lambda: acoc(trace))):
        try:
            print(f"{name}: {float(fn()):.4f}")
        except InsufficientData as exc:
            print(f"{name}: n/a ({exc})")
    return 0


def _cmd_bench(args, parser):
    prec = _precision(parser, args.digits)
    if args.table is not None:
        report = benchmod.run_benchmark_table(args.table, prec, args.jobs)
    elif args.problem is not None:
        keys = args.methods.split(",") if args.methods else [m.key for m in benchmod.TABLE_ROSTERS[3]]
        bad = [k for k in keys if k not in METHOD_IDS]
        if bad:
            parser.error(f"unknown method id(s): {', '.join(bad)}")
        report = benchmod.run_table(get_problem(args.problem), keys, prec, jobs=args.jobs)
    else:
        parser.error("bench needs --table or --problem")
    print(benchmod.format_text(report))
    if args.out:
        benchmod.write_csv(report, args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_validate(args, parser):
    prec = _precision(parser, args.digits)
    ok = True
    for w in builtin_weight_pairs():
        report = validate_weight_pair(w, prec)
        ok &= report.passed
        print(f"{w.id}: {'PASS' if report.passed else 'FAIL'}")
        for c in report.checks:
            print(f"  {c.name:<14} {'PASS' if c.passed else 'FAIL'}  residual {nstr(c.residual, 3)}")
    return 0 if ok else 1


def _cmd_constants(args, parser):
    prec = _precision(parser, args.digits)
    try:
        phi2 = make_scalar(args.phi2, prec)
    except ParseError as exc:
        parser.error(str(exc))
    const = error_constants(get_problem(args.problem), phi2, prec)
    with prec.context():
        # finite-difference noise below the working tolerance is shown as 0
        tol = prec.tolerance()
        for name in ("c2", "c3", "c4", "R4", "R8"):
            print(f"{name} = {nstr(chop(getattr(const, name), tol), 20)}")
    return 0


def _suffixed(path, key):
    p = Path(path)
    return str(p.with_name(f"{p.stem}_{key}{p.suffix}"))


def _cmd_basin(args, parser):
    prec = _precision(parser, args.digits)
    if args.grid < 1 or args.maxiter < 1 or args.tol <= 0:
        parser.error("--grid and --maxiter must be >= 1 and --tol positive")
    methods = BASIN_ROSTER if args.method == "all" else (MethodId.from_key(args.method),)
    problem = get_problem(args.problem)
    images, entries = [], []
    for m in methods:
        try:
            cfg = BasinConfig(problem=problem, method=m, grid_width=args.grid, grid_height=args.grid,
                              bounds=tuple(args.bounds), max_iters=args.maxiter, root_tol=args.tol,
                              precision=prec)
        except ValueError as exc:
            parser.error(str(exc))
        img = render_basin(cfg, jobs=args.jobs)
        stats = basin_stats(img)
        images.append(img)
        entries.append((m.key, stats))
        print(",".join(str(v) for v in stats_row(m.key, stats)))
        if args.out:
            path = _suffixed(args.out, m.key) if len(methods) > 1 else args.out
            write_ppm(img, path)
    if args.stats:
        write_stats_csv(entries, args.stats)
    if args.figure:
        from .plotting import plot_basin, plot_basin_panel

        if len(images) > 1:
            plot_basin_panel(images, tuple(args.bounds), args.figure)
        else:
            plot_basin(images[0], tuple(args.bounds), args.figure)
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "bench": _cmd_bench,
    "validate-weights": _cmd_validate,
    "constants": _cmd_constants,
    "basin": _cmd_basin,
}


def main(argv=None):
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args, parser)
    except (RootLabError, OSError, ValueError) as exc:
        print(f"nsroots: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
