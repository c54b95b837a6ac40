"""Iteration steps: Newton, Newton-Secant, the weighted two- and three-point
Newton-Secant schemes, and eight established optimal eighth-order comparators.

Every step takes a :class:`~nsroots.problems.CountingOracle` and the current
iterate and returns the next one.  Steps are written with plain arithmetic so
they run unchanged on ``mpf``, ``mpc``, ``fractions.Fraction`` and numpy
``complex128`` arrays.  On scalars a zero denominator raises a typed
:class:`~nsroots.errors.StepError`; on arrays it propagates as inf/nan and the
caller masks it.

When f vanishes exactly at the current point or at a sub-step point, that
point is returned: it is a root at working precision and every formula below
reduces to it in the limit.
"""

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from mpmath import mpf

from .errors import (
    ApproxDerivativeZero,
    AtRoot,
    DegenerateNodes,
    DegenerateStep,
    DerivativeZero,
    NotSimpleRoot,
    SecantDegenerate,
    StepError,
    WeightPole,
)
from .numeric import BENCH_PRECISION, is_array, is_exact_zero, nth_derivative_fd, where


class MethodId(enum.Enum):
    NEWTON = ("newton", 2, 2, False)
    NS3 = ("ns3", 3, 3, False)
    TWO_POINT4 = ("tp4", 4, 3, True)
    SLSS = ("slss", 8, 4, True)
    M2 = ("m2", 8, 4, True)
    M3 = ("m3", 8, 4, True)
    M4 = ("m4", 8, 4, True)
    BRW = ("brw", 8, 4, False)
    WL = ("wl", 8, 4, False)
    SS = ("ss", 8, 4, False)
    BCST = ("bcst", 8, 4, False)
    CFGT = ("cfgt", 8, 4, False)
    CTV = ("ctv", 8, 4, False)
    TP = ("tp", 8, 4, False)
    CL = ("cl", 8, 4, False)

    def __init__(self, key, order, evals, weighted):
        self.key = key
        self.order = order
        self.evals = evals
        self.weighted = weighted

    @property
    def efficiency_index(self):
        return self.order ** (1.0 / self.evals)

    @classmethod
    def from_key(cls, key):
        for m in cls:
            if m.key == key:
                return m
        raise KeyError(f"unknown method id {key!r}")

    def __str__(self):
        return self.key


NEW_EIGHTH_ORDER = (MethodId.SLSS, MethodId.M2, MethodId.M3, MethodId.M4)
COMPARATORS = (
    MethodId.BRW,
    MethodId.WL,
    MethodId.SS,
    MethodId.BCST,
    MethodId.CFGT,
    MethodId.CTV,
    MethodId.TP,
    MethodId.CL,
)
EIGHTH_ORDER = NEW_EIGHTH_ORDER + COMPARATORS


@dataclass(frozen=True)
class WeightPair:
    """Weight functions phi(t), t = f(y)/f(x), and psi(s), s = f(v)/f(x)."""

    id: str
    phi: Callable
    psi: Callable
    phi_domain_note: str = ""
    psi_domain_note: str = ""
    phi_poles: tuple = field(default=())
    psi_poles: tuple = field(default=())

    def phi_at(self, t):
        try:
            return self.phi(t)
        except ZeroDivisionError as exc:
            raise WeightPole(f"{self.id}: phi has a pole at t = {t}") from exc

    def psi_at(self, s):
        try:
            return self.psi(s)
        except ZeroDivisionError as exc:
            raise WeightPole(f"{self.id}: psi has a pole at s = {s}") from exc


def _p1_phi(t):
    return -t / 2 - 5 * t**2 / 4


def _p1_psi(s):
    return (1 + 2 * s) / (1 + s)


def _p2_phi(t):
    return t + 9 * t / (5 * t - 6)


def _p2_psi(s):
    return 1 / (1 - s)


def _p3_phi(t):
    return t / (5 * t - 2)


def _p3_psi(s):
    return 1 + 2 * s / (2 + 5 * s)


def _p4_phi(t):
    return -(6 * t + t**2) / 4 + t / (1 + t)


def _p4_psi(s):
    return (1 + s) ** ((s + 1) / (2 * s + 1))


P1 = WeightPair(
    "p1", _p1_phi, _p1_psi,
    "polynomial, no poles", "pole at s = -1",
    (), (Fraction(-1),),
)
P2 = WeightPair(
    "p2", _p2_phi, _p2_psi,
    "pole at t = 6/5", "pole at s = 1",
    (Fraction(6, 5),), (Fraction(1),),
)
P3 = WeightPair(
    "p3", _p3_phi, _p3_psi,
    "pole at t = 2/5", "pole at s = -2/5",
    (Fraction(2, 5),), (Fraction(-2, 5),),
)
P4 = WeightPair(
    "p4", _p4_phi, _p4_psi,
    "pole at t = -1", "branch point at s = -1, exponent pole at s = -1/2",
    (Fraction(-1),), (Fraction(-1), Fraction(-1, 2)),
)

_PAIR_FOR = {MethodId.SLSS: P1, MethodId.M2: P2, MethodId.M3: P3, MethodId.M4: P4}


def builtin_weight_pairs():
    return [P1, P2, P3, P4]


def weight_pair_for(method):
    """Default weight pair of a weighted method (P1 for the two-point scheme)."""
    return _PAIR_FOR.get(method, P1)


# --- plumbing -------------------------------------------------------------


class _Landed(Exception):
    def __init__(self, point):
        self.point = point


def _landed(fval, point):
    if is_exact_zero(fval):
        raise _Landed(point)


def _nz(value, exc, what):
    if is_exact_zero(value):
        raise exc(what)
    return value


def _settle(out, *landings):
    # Array counterpart of _landed: pixels where f vanished keep the sub-step point.
    if not is_array(out):
        return out
    for fval, point in reversed(landings):
        out = where(fval == 0, point, out)
    return out


def divided_difference(f_u, f_v, u, v):
    d = _nz(u - v, DegenerateNodes, "divided difference with equal nodes")
    return (f_u - f_v) / d


# --- Newton and the Newton-Secant family ----------------------------------


def newton_step(o, x):
    fx = o.f(x)
    if is_exact_zero(fx):
        return x
    fpx = _nz(o.fprime(x), DerivativeZero, "f'(x) = 0")
    return _settle(x - fx / fpx, (fx, x))


def newton_secant_step(o, x):
    """Third-order Newton-Secant step: 2 f-evaluations, 1 f'-evaluation."""
    try:
        fx = o.f(x)
        _landed(fx, x)
        fpx = _nz(o.fprime(x), DerivativeZero, "f'(x) = 0")
        y = x - fx / fpx
        fy = o.f(y)
        _landed(fy, y)
        d = _nz(fx - fy, SecantDegenerate, "f(x) = f(y)")
        return _settle(x - fx * fx / (d * fpx), (fx, x), (fy, y))
    except _Landed as hit:
        return hit.point


def _two_point(o, x, w):
    fx = o.f(x)
    _landed(fx, x)
    fpx = _nz(o.fprime(x), DerivativeZero, "f'(x) = 0")
    u = fx / fpx
    y = x - u
    fy = o.f(y)
    _landed(fy, y)
    d = _nz(fx - fy, SecantDegenerate, "f(x) = f(y)")
    z = x - fx * fx / (d * fpx)
    t = fy / fx
    bracket = 1 - fx / d * (1 + fy / d)
    return fx, fpx, y, fy, z, z - bracket * u * w.phi_at(t)


def two_point4_step(o, x, w=P1):
    """Fourth-order two-point step weighted by ``w.phi``; 3 evaluations."""
    try:
        fx, _, y, fy, _, out = _two_point(o, x, w)
        return _settle(out, (fx, x), (fy, y))
    except _Landed as hit:
        return hit.point


def approx_fz(fx, fy, fv, fpx, x, y, z, v):
    """Estimate f(z) from f(x), f'(x), f(y), f(v) by a cubic Taylor model at x."""
    vx = _nz(v - x, DegenerateNodes, "v = x")
    if is_exact_zero(fx):
        raise AtRoot("f(x) = 0")
    a = fy * fpx**2 / fx**2
    zx = z - x
    return fx + fpx * zx + a * zx**2 + ((fv - fx) / vx - fpx - a * vx) * zx**3 / vx**2


def approx_fprime_v(fz_approx, fy, fx, fpx, x, y, z, v):
    """Linear model of f'(v) built from the estimated f'(z)."""
    zx = _nz(z - x, DegenerateNodes, "z = x")
    zy = _nz(z - y, DegenerateNodes, "z = y")
    fzy = (fz_approx - fy) / zy
    fzx = (fz_approx - fx) / zx
    return fpx + (fzy + (fzx - fpx) * zy / zx - fpx) / zx * (v - x)


def three_point8_step(o, x, w=P1):
    """Eighth-order three-point step: 3 f-evaluations (x, y, v) and f'(x)."""
    try:
        fx, fpx, y, fy, z, v = _two_point(o, x, w)
        fv = o.f(v)
        _landed(fv, v)
        fz = approx_fz(fx, fy, fv, fpx, x, y, z, v)
        dv = _nz(approx_fprime_v(fz, fy, fx, fpx, x, y, z, v), ApproxDerivativeZero, "f'(v) estimate = 0")
        out = v - fv / dv * w.psi_at(fv / fx)
        return _settle(out, (fx, x), (fy, y), (fv, v))
    except _Landed as hit:
        return hit.point


# --- comparators ----------------------------------------------------------

# Free parameters of the comparator families.
BRW_BETA = Fraction(-1, 2)
TP_ALPHA, TP_BETA = 1, 1
CTV_BETAS = (1, 1, 1)
CL_BETA, CL_GAMMA = 0, 0


def _start(o, x):
    fx = o.f(x)
    _landed(fx, x)
    fpx = _nz(o.fprime(x), DerivativeZero, "f'(x) = 0")
    y = x - fx / fpx
    fy = o.f(y)
    _landed(fy, y)
    return fx, fpx, y, fy


def _frac(q, x):
    # Multiply by a rational constant without forcing the result type.
    return x * q.numerator / q.denominator if isinstance(q, Fraction) else x * q


def _brw(o, x):
    fx, fpx, y, fy = _start(o, x)
    den = _nz(fx + _frac(BRW_BETA - 2, fy), DegenerateStep, "brw z-step")
    z = y - fy / fpx * (fx + _frac(BRW_BETA, fy)) / den
    fz = o.f(z)
    _landed(fz, z)
    zy = _nz(z - y, DegenerateStep, "brw f[z,y]")
    zx = _nz(z - x, DegenerateStep, "brw f[z,x,x]")
    fzxx = ((fz - fx) / zx - fpx) / zx
    den = _nz((fz - fy) / zy + fzxx * zy, DegenerateStep, "brw last step")
    h = _nz(1 - fz / fx, DegenerateStep, "brw weight H")
    return _settle(z - fz / den / h**2, (fx, x), (fy, y), (fz, z))


def _wl(o, x):
    fx, fpx, y, fy = _start(o, x)
    t = fy / fx
    z = x - fx / fpx * (1 - t) / _nz(1 - 2 * t, DegenerateStep, "wl weight G")
    fz = o.f(z)
    _landed(fz, z)
    s = fz / fy
    h = (5 - 2 * t + t**2) / _nz(5 - 12 * t, DegenerateStep, "wl weight H")
    return _settle(z - fz / fpx * (h + (1 + 4 * t) * s), (fx, x), (fy, y), (fz, z))


def _ss(o, x):
    fx, fpx, y, fy = _start(o, x)
    z = y - fy / fpx * fx / _nz(fx - 2 * fy, DegenerateStep, "ss z-step")
    fz = o.f(z)
    _landed(fz, z)
    fxy = (fx - fy) / _nz(x - y, DegenerateStep, "ss f[x,y]")
    fxz = (fx - fz) / _nz(x - z, DegenerateStep, "ss f[x,z]")
    fyz = (fy - fz) / _nz(y - z, DegenerateStep, "ss f[y,z]")
    den = _nz(fxz * fyz, DegenerateStep, "ss last step")
    t = fz / fx
    weight = 1 + t / _nz(1 + t, DegenerateStep, "ss weight W")
    return _settle(z - fxy * fz / den * weight, (fx, x), (fy, y), (fz, z))


def _bcst(o, x):
    fx = o.f(x)
    _landed(fx, x)
    fpx = _nz(o.fprime(x), DerivativeZero, "f'(x) = 0")
    u = fx / fpx
    y = x - u * (1 + u**5)
    fy = o.f(y)
    _landed(fy, y)
    t = fy / fx
    z = y - fy / fpx / _nz(1 - t, DegenerateStep, "bcst z-step") ** 2
    fz = o.f(z)
    _landed(fz, z)
    den = _nz(1 - t - fz / fx, DegenerateStep, "bcst last step") ** 2
    out = z - fz / fpx * (1 + t**2 + 5 * t**4 + fz / fy) / den
    return _settle(out, (fx, x), (fy, y), (fz, z))


def _cfgt(o, x):
    fx, fpx, y, fy = _start(o, x)
    den = _nz(fx**3 - 2 * fx**2 * fy - fx * fy**2 - fy**3 / 2, DegenerateStep, "cfgt z-step")
    z = y - fx**3 / den * fy / fpx
    fz = o.f(z)
    _landed(fz, z)
    zy = _nz(z - y, DegenerateStep, "cfgt f[z,y]")
    zx = _nz(z - x, DegenerateStep, "cfgt f[z,x,x]")
    fzxx = ((fz - fx) / zx - fpx) / zx
    den = _nz((fz - fy) / zy + fzxx * zy, DegenerateStep, "cfgt last step")
    ratio = (fx + 3 * fz) / _nz(fx + fz, DegenerateStep, "cfgt weight")
    return _settle(z - ratio * fz / den, (fx, x), (fy, y), (fz, z))


def _ctv(o, x):
    b1, b2, b3 = CTV_BETAS
    gamma = 3 * (b2 + b3)
    fx, fpx, y, fy = _start(o, x)
    d = _nz(fx - 2 * fy, DegenerateStep, "ctv z-step")
    z = y - fy / fpx * fx / d
    fz = o.f(z)
    _landed(fz, z)
    inner = (fx - fy) / d + fz / _nz(fy - 2 * fz, DegenerateStep, "ctv v-step") / 2
    v = z - fz / fpx * inner**2
    den = _nz(b1 * (v - z) + b2 * (y - x) + b3 * (z - x), DegenerateStep, "ctv last step")
    return _settle(v - fz / fpx * gamma * (v - z) / den, (fx, x), (fy, y), (fz, z))


def _tp(o, x):
    a, b = TP_ALPHA, TP_BETA
    fx, fpx, y, fy = _start(o, x)
    den = _nz(fx + (b - 2) * fy, DegenerateStep, "tp z-step")
    z = y - fy / fpx * (fx + b * fy) / den
    fz = o.f(z)
    _landed(fz, z)
    t = fy / fx
    hden = _nz(5 - 2 * b - (12 - 12 * b + 2 * b**2) * t, DegenerateStep, "tp weight H")
    h = (5 - 2 * b - (2 - 8 * b + 2 * b**2) * t + (1 + 4 * b) * t**2) / hden
    corr = h + fz / _nz(fy - a * fz, DegenerateStep, "tp weight") + 4 * fz / fx
    return _settle(z - fz / fpx * corr, (fx, x), (fy, y), (fz, z))


def _cl(o, x):
    fx, fpx, y, fy = _start(o, x)
    t = fy / fx
    z = y - fy / fpx / _nz(1 - t, DegenerateStep, "cl z-step") ** 2
    fz = o.f(z)
    _landed(fz, z)
    s, u = fz / fx, fz / fy
    h = -CL_BETA - CL_GAMMA + t + t**2 / 2 - t**3 / 2
    j = CL_BETA + s / 2
    p = CL_GAMMA + u / 2
    den = _nz(1 - h - j - p, DegenerateStep, "cl last step") ** 2
    return _settle(z - fz / fpx / den, (fx, x), (fy, y), (fz, z))


_COMPARATOR_STEPS = {
    MethodId.BRW: _brw,
    MethodId.WL: _wl,
    MethodId.SS: _ss,
    MethodId.BCST: _bcst,
    MethodId.CFGT: _cfgt,
    MethodId.CTV: _ctv,
    MethodId.TP: _tp,
    MethodId.CL: _cl,
}


def comparator_step(m, o, x):
    """One iteration of a comparator method; exactly 4 evaluations."""
    try:
        fn = _COMPARATOR_STEPS[m]
    except KeyError:
        raise ValueError(f"{m} is not a comparator method") from None
    try:
        return fn(o, x)
    except _Landed as hit:
        return hit.point


def step(m, o, x, w=None):
    """Dispatch one iteration of method ``m``.

    Stray zero divisions that slip past the explicit guards (e.g. inside
    mpmath) are reported as :class:`DegenerateStep`.
    """
    try:
        if m is MethodId.NEWTON:
            return newton_step(o, x)
        if m is MethodId.NS3:
            return newton_secant_step(o, x)
        if m is MethodId.TWO_POINT4:
            return two_point4_step(o, x, w or P1)
        if m in _PAIR_FOR:
            return three_point8_step(o, x, w or _PAIR_FOR[m])
        return comparator_step(m, o, x)
    except ZeroDivisionError as exc:
        raise DegenerateStep(f"{m.key}: {exc or 'division by zero'}") from exc


# --- weight conditions and error constants --------------------------------


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    value: object
    target: object
    residual: object
    passed: bool


@dataclass(frozen=True)
class WeightValidation:
    pair_id: str
    tolerance: object
    checks: tuple

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def failed(self):
        return [c.name for c in self.checks if not c.passed]


WEIGHT_CONDITIONS = (
    ("phi(0)=0", "phi", 0, Fraction(0)),
    ("phi'(0)=-1/2", "phi", 1, Fraction(-1, 2)),
    ("phi''(0)=-5/2", "phi", 2, Fraction(-5, 2)),
    ("psi(0)=1", "psi", 0, Fraction(1)),
    ("psi'(0)=1", "psi", 1, Fraction(1)),
)


def validate_weight_pair(w, p=BENCH_PRECISION):
    """Check the five weight conditions that make the three-point scheme eighth order."""
    with p.context():
        tau = p.tolerance()
        checks = []
        for name, which, k, target in WEIGHT_CONDITIONS:
            g = w.phi if which == "phi" else w.psi
            value = nth_derivative_fd(g, k, mpf(0))
            tgt = mpf(target.numerator) / target.denominator
            residual = abs(value - tgt)
            checks.append(ConditionCheck(name, value, tgt, residual, bool(residual < tau)))
    return WeightValidation(w.id, tau, tuple(checks))


@dataclass(frozen=True)
class ErrorConstants:
    c2: object
    c3: object
    c4: object
    R4: object
    R8: object


def error_constants(problem, phi_second=Fraction(-5, 2), p=BENCH_PRECISION):
    """Taylor ratios c_k = f^(k)(x*)/(k! f'(x*)) and the predicted constants R4, R8.

    R4 is the fourth-order constant of the two-point scheme,
    R8 = c2^2 c3 (29 c2^3 + 4 c2 c3 - 4 c4) / 4 that of the three-point scheme.
    """
    with p.context():
        root = problem.root_value()
        d1 = nth_derivative_fd(problem.f, 1, root)
        if abs(d1) < p.tolerance():
            raise NotSimpleRoot(f"f'({problem.root}) vanishes")
        c2 = nth_derivative_fd(problem.f, 2, root) / (2 * d1)
        c3 = nth_derivative_fd(problem.f, 3, root) / (6 * d1)
        c4 = nth_derivative_fd(problem.f, 4, root) / (24 * d1)
        if isinstance(phi_second, Fraction):
            phi2 = mpf(phi_second.numerator) / phi_second.denominator
        else:
            phi2 = mpf(phi_second)
        r4 = -c2 * c3 + c2**3 * (mpf(5) / 2 + phi2)
        r8 = c2**2 * c3 * (29 * c2**3 + 4 * c2 * c3 - 4 * c4) / 4
    return ErrorConstants(c2, c3, c4, r4, r8)


__all__ = [
    "MethodId", "WeightPair", "P1", "P2", "P3", "P4", "StepError",
    "builtin_weight_pairs", "weight_pair_for", "divided_difference", "newton_step",
    "newton_secant_step", "two_point4_step", "approx_fz", "approx_fprime_v",
    "three_point8_step", "comparator_step", "step", "validate_weight_pair",
    "error_constants", "ErrorConstants", "WeightValidation", "EIGHTH_ORDER",
    "NEW_EIGHTH_ORDER", "COMPARATORS",
]
