"""Benchmark tables: errors of the first three iterates, COC and ACOC per method."""

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import mpmath
from mpmath import mpf

from .driver import RunPolicy, Termination, acoc_from_iterates, coc_from_errors, admissibility_floor, iterate
from .errors import InsufficientData, RootLabError
from .methods import EIGHTH_ORDER, NEW_EIGHTH_ORDER, MethodId, step, weight_pair_for
from .numeric import BENCH_PRECISION, Precision
from .problems import CountingOracle, get_problem

TABLE_PROBLEMS = {1: "t1", 2: "t2", 3: "t3", 4: "t4"}
TABLE_ROSTERS = {
    1: NEW_EIGHTH_ORDER,
    2: NEW_EIGHTH_ORDER,
    3: EIGHTH_ORDER,
    4: EIGHTH_ORDER,
}
BENCH_ITERATIONS = 3
CSV_HEADER = ("method", "err1", "err2", "err3", "coc", "acoc")


@dataclass
class Row:
    method: MethodId
    errors: list = field(default_factory=list)
    coc: Optional[object] = None
    acoc: Optional[object] = None
    failure: Optional[str] = None
    f_evals: int = 0
    fprime_evals: int = 0

    @property
    def failed(self):
        return self.failure is not None


@dataclass
class Report:
    problem_id: str
    precision: Precision
    iterations: int
    rows: list


def _probe_iterate(problem, method, x_last, precision):
    """One extra iterate at doubled precision.

    ACOC needs four iterates ending one step past the last reported one; that
    step lands far below the working precision's resolution around the root,
    so it is computed with guard digits.  Returns None if it degenerates.
    """
    guard = precision.guarded()
    w = weight_pair_for(method) if method.weighted else None
    with guard.context():
        try:
            return step(method, CountingOracle(problem), +x_last, w)
        except (RootLabError, ZeroDivisionError):
            return None


def _acoc(iterates, probe, precision):
    with precision.guarded().context():
        if probe is not None and probe != iterates[-1]:
            try:
                return +acoc_from_iterates(list(iterates[1:]) + [probe])
            except InsufficientData:
                pass
        return acoc_from_iterates(iterates)


def run_row(problem, method, precision=BENCH_PRECISION, iterations=BENCH_ITERATIONS):
    trace = iterate(problem, method, policy=RunPolicy(max_iters=iterations), precision=precision)
    row = Row(method, f_evals=trace.f_evals, fprime_evals=trace.fprime_evals)
    if trace.termination is Termination.STEP_ERROR or trace.steps < iterations:
        row.failure = f"{trace.termination.value}: {trace.detail}" if trace.detail else trace.termination.value
        row.errors = trace.errors[1:]
        return row
    row.errors = trace.errors[1:]
    with precision.context():
        try:
            row.coc = coc_from_errors(trace.errors, admissibility_floor(precision.decimal_digits))
        except InsufficientData:
            row.coc = None
    probe = _probe_iterate(problem, method, trace.iterates[-1], precision)
    try:
        row.acoc = _acoc(trace.iterates, probe, precision)
    except InsufficientData:
        row.acoc = None
    return row


def _run_row_job(args):
    problem_id, method_key, digits, iterations = args
    return run_row(get_problem(problem_id), MethodId.from_key(method_key), Precision(digits), iterations)


def run_table(problem, methods, digits=BENCH_PRECISION, iterations=BENCH_ITERATIONS, jobs=1):
    """Run every method for ``iterations`` steps from the problem's canonical start.

    Rows keep roster order whatever ``jobs`` is.  Parallel runs require a
    built-in problem (workers look it up by id).
    """
    if isinstance(digits, int):
        digits = Precision(digits)
    methods = [MethodId.from_key(m) if isinstance(m, str) else m for m in methods]
    if jobs > 1 and len(methods) > 1:
        args = [(problem.id, m.key, digits.decimal_digits, iterations) for m in methods]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_row_job, args))
    else:
        rows = [run_row(problem, m, digits, iterations) for m in methods]
    return Report(problem.id, digits, iterations, rows)


def run_benchmark_table(table, digits=BENCH_PRECISION, jobs=1):
    problem = get_problem(TABLE_PROBLEMS[table])
    return run_table(problem, TABLE_ROSTERS[table], digits, BENCH_ITERATIONS, jobs)


def format_error(e):
    """Format a positive error as ``0.mmme<k>``: mantissa in [0.1, 1), 3 significant digits."""
    e = mpf(e)
    if e == 0:
        return "0"
    if e < 0:
        raise ValueError("errors are non-negative")
    with mpmath.workdps(30):
        k = int(mpmath.floor(mpmath.log10(e))) + 1
        m = e / mpf(10) ** k
        if m >= 1:
            m, k = m / 10, k + 1
        elif m < mpf("0.1"):
            m, k = m * 10, k - 1
        digits = int(mpmath.nint(m * 1000))
        if digits == 1000:
            digits, k = 100, k + 1
    return f"0.{digits:03d}e{k}"


def format_order(value):
    return "" if value is None else f"{float(value):.4f}"


def report_rows(report):
    """CSV-ready string rows, failures as ``[method, 'FAIL', '', '', '', '']``."""
    out = []
    for row in report.rows:
        if row.failed:
            out.append([row.method.key, "FAIL", "", "", "", ""])
            continue
        errs = [format_error(e) for e in row.errors]
        out.append([row.method.key, *errs, format_order(row.coc), format_order(row.acoc)])
    return out


def write_csv(report, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(report_rows(report))


def format_text(report):
    """Aligned plain-text rendering of a report."""
    header = ["method", "|x1-x*|", "|x2-x*|", "|x3-x*|", "COC", "ACOC"]
    body = report_rows(report)
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]
    lines = [f"problem {report.problem_id}, {report.precision.decimal_digits} digits, {report.iterations} iterations"]
    for r in [header, *body]:
        lines.append("  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))))
    return "\n".join(lines)
