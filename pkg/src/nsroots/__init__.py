"""Optimal Newton-secant multipoint root finders at arbitrary precision.

Fourth- and eighth-order methods with weight functions, eight eighth-order
comparators, order-of-convergence estimators, benchmark tables and basins of
attraction.
"""

from .driver import RunPolicy, Termination, Trace, acoc, coc, iterate
from .methods import MethodId, step
from .numeric import BASIN_PRECISION, BENCH_PRECISION, Precision
from .problems import Problem, builtin_suite, get_problem

__all__ = [
    "BASIN_PRECISION",
    "BENCH_PRECISION",
    "MethodId",
    "Precision",
    "Problem",
    "RunPolicy",
    "Termination",
    "Trace",
    "acoc",
    "builtin_suite",
    "coc",
    "get_problem",
    "iterate",
    "step",
]

__version__ = "0.1.0"
