"""Run an iteration, record its trace, and estimate the order of convergence."""

import enum
from dataclasses import dataclass, field
from typing import Optional

import mpmath
from mpmath import mp, mpf

from .errors import EvalError, ExactRootReached, InsufficientData, StepError
from .methods import MethodId, step, weight_pair_for
from .numeric import BENCH_PRECISION, make_complex, make_scalar
from .problems import CountingOracle


class Termination(enum.Enum):
    MAX_ITERS = "max-iters"
    RESIDUAL = "residual"
    AT_ROOT = "at-root"
    STEP_ERROR = "step-error"
    DIVERGED = "diverged"


@dataclass(frozen=True)
class RunPolicy:
    max_iters: int = 3
    residual_tol: Optional[object] = None
    divergence_bound: object = 10**10

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.divergence_bound > 0:
            raise ValueError("divergence_bound must be positive")


@dataclass
class Trace:
    method: MethodId
    iterates: list
    errors: list
    f_evals: int
    fprime_evals: int
    termination: Termination
    detail: Optional[BaseException] = None
    precision: object = BENCH_PRECISION
    problem_id: str = ""
    weights_id: Optional[str] = None
    extras: dict = field(default_factory=dict)

    @property
    def steps(self):
        return len(self.iterates) - 1

    @property
    def total_evals(self):
        return self.f_evals + self.fprime_evals


def _coerce_start(x0, problem, precision):
    if x0 is None:
        x0 = problem.x0
    if isinstance(x0, str):
        return make_complex(x0, precision) if problem.complex_ok else make_scalar(x0, precision)
    return mpmath.mpmathify(x0)


def _error_to_known_roots(x, roots):
    return min(abs(x - r) for r in roots)


def iterate(problem, method, x0=None, policy=None, weights=None, precision=BENCH_PRECISION):
    """Apply ``method`` from ``x0`` (the problem's canonical start by default).

    Never raises for numerical failures; they end the run and are recorded in
    ``Trace.termination`` / ``Trace.detail``.
    """
    policy = policy or RunPolicy()
    if isinstance(method, str):
        method = MethodId.from_key(method)
    if method.weighted and weights is None:
        weights = weight_pair_for(method)
    oracle = CountingOracle(problem)
    termination, detail = Termination.MAX_ITERS, None
    with precision.context():
        x = _coerce_start(x0, problem, precision)
        iterates = [x]
        bound = mpf(policy.divergence_bound)
        tol = None if policy.residual_tol is None else mpf(policy.residual_tol)
        for _ in range(policy.max_iters):
            try:
                x_new = step(method, oracle, x, weights)
            except (StepError, EvalError) as exc:
                termination, detail = Termination.STEP_ERROR, exc
                break
            if x_new == x:
                termination = Termination.AT_ROOT
                break
            iterates.append(x_new)
            x = x_new
            if abs(x) > bound:
                termination = Termination.DIVERGED
                break
            if tol is not None:
                try:
                    residual = abs(problem.f(x))
                except EvalError as exc:
                    termination, detail = Termination.STEP_ERROR, exc
                    break
                if residual < tol:
                    termination = Termination.RESIDUAL
                    break
        roots = problem.root_values() if problem.roots else []
        errors = [_error_to_known_roots(v, roots) for v in iterates] if roots else []
    return Trace(
        method=method,
        iterates=iterates,
        errors=errors,
        f_evals=oracle.f_count,
        fprime_evals=oracle.fprime_count,
        termination=termination,
        detail=detail,
        precision=precision,
        problem_id=problem.id,
        weights_id=weights.id if weights is not None else None,
    )


def admissibility_floor(digits=None):
    """Errors at or below 10^(-digits+50) are too close to rounding to enter a log ratio.

    The 50-digit margin shrinks to digits/4 at low precision so short runs stay usable.
    """
    d = mp.dps if digits is None else digits
    return mpf(10) ** (min(50, d // 4) - d)


def coc_from_errors(errors, floor=None):
    """ln|e(n+1)/e(n)| / ln|e(n)/e(n-1)| over the last three admissible errors."""
    floor = admissibility_floor() if floor is None else floor
    usable = [abs(mpf(e)) for e in errors if abs(mpf(e)) > floor]
    if len(usable) < 3:
        if any(e == 0 for e in errors):
            raise ExactRootReached("an iterate hit the root exactly; COC undefined")
        raise InsufficientData(f"COC needs 3 admissible errors, got {len(usable)}")
    e0, e1, e2 = usable[-3:]
    den = mpmath.log(e1 / e0)
    if den == 0:
        raise InsufficientData("stagnating errors")
    return mpmath.log(e2 / e1) / den


def coc(trace, root=None):
    """Computational order of convergence of a trace (errors against ``root`` if given)."""
    with trace.precision.context():
        if root is None:
            errors = trace.errors
        else:
            r = mpmath.mpmathify(root)
            errors = [abs(x - r) for x in trace.iterates]
        return coc_from_errors(errors, admissibility_floor(trace.precision.decimal_digits))


def acoc_from_iterates(iterates):
    """Root-free order estimate from the last four iterates."""
    if len(iterates) < 4:
        raise InsufficientData(f"ACOC needs 4 iterates, got {len(iterates)}")
    x = iterates[-4:]
    d = [x[k + 1] - x[k] for k in range(3)]
    if any(v == 0 for v in d):
        raise InsufficientData("repeated consecutive iterates")
    den = mpmath.log(abs(d[1] / d[0]))
    if den == 0:
        raise InsufficientData("stagnating iterates")
    return mpmath.log(abs(d[2] / d[1])) / den


def acoc(trace):
    with trace.precision.context():
        return acoc_from_iterates(trace.iterates)
