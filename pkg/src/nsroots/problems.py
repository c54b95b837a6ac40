"""Test problems and the evaluation-counting oracle."""

from dataclasses import dataclass, field
from typing import Callable, Optional

import mpmath
import numpy as np
from mpmath import mpc, mpf

from .errors import DomainError
from .numeric import is_array


@dataclass(frozen=True)
class Problem:
    """A scalar equation f(x) = 0 with its analytic derivative.

    ``root`` and ``x0`` are decimal literals so they can be materialised at any
    precision.  ``roots`` lists every known simple zero (complex literals are
    written ``"1j"``); it defaults to ``(root,)``.
    """

    id: str
    f: Callable
    fprime: Callable
    root: Optional[str]
    x0: str
    description: str
    roots: tuple = field(default=())
    complex_ok: bool = False

    def __post_init__(self):
        if not self.roots and self.root is not None:
            object.__setattr__(self, "roots", (self.root,))

    def root_value(self):
        return None if self.root is None else mpf(self.root)

    def root_values(self):
        """Known zeros at the current precision (``mpc`` when any is non-real)."""
        vals = [mpmath.mpmathify(r.replace("i", "j")) for r in self.roots]
        if any(isinstance(v, mpc) for v in vals):
            vals = [mpc(v) for v in vals]
        return vals

    def root_array(self):
        return np.array([complex(r.replace("i", "j")) for r in self.roots], dtype=np.complex128)


class CountingOracle:
    """Wraps a problem and counts every evaluation of f and f'.

    One oracle per running trace; counts are never reset implicitly.
    """

    def __init__(self, problem):
        self.problem = problem
        self.f_count = 0
        self.fprime_count = 0

    def f(self, x):
        self.f_count += 1
        return self.problem.f(x)

    def fprime(self, x):
        self.fprime_count += 1
        return self.problem.fprime(x)

    @property
    def total(self):
        return self.f_count + self.fprime_count

    def __repr__(self):
        return f"CountingOracle({self.problem.id!r}, f={self.f_count}, f'={self.fprime_count})"


def eval_f(oracle, x):
    return oracle.f(x)


def eval_fprime(oracle, x):
    return oracle.fprime(x)


def _real_only(x, name):
    if isinstance(x, mpc) or is_array(x) or isinstance(x, complex):
        raise DomainError(f"{name} is only instantiated on real scalars")


def _t1(x):
    return mpmath.sin(x) - x / 100


def _t1p(x):
    return mpmath.cos(x) - mpf(1) / 100


def _t2(x):
    return mpmath.atan(x)


def _t2p(x):
    return 1 / (1 + x * x)


def _t3(x):
    return mpmath.exp(mpmath.sin(x)) - 1 - x / 5


def _t3p(x):
    return mpmath.exp(mpmath.sin(x)) * mpmath.cos(x) - mpf(1) / 5


def _t4(x):
    _real_only(x, "t4")
    q = 1 - x + x * x
    if q <= 0:
        raise DomainError("log of a non-positive argument")
    return mpmath.log(q) + 4 * mpmath.sin(1 - x)


def _t4p(x):
    _real_only(x, "t4")
    q = 1 - x + x * x
    return (2 * x - 1) / q - 4 * mpmath.cos(1 - x)


def _check_pole(z):
    if not is_array(z) and z == 0:
        raise DomainError("pole of 1/z at z = 0")


def _b1(z):
    _check_pole(z)
    return z**3 - 1 / z


def _b1p(z):
    _check_pole(z)
    return 3 * z**2 + 1 / (z * z)


T1 = Problem("t1", _t1, _t1p, "0", "0.1", "sin(x) - x/100")
T2 = Problem("t2", _t2, _t2p, "0", "0.1", "arctan(x)")
T3 = Problem("t3", _t3, _t3p, "0", "0.1", "exp(sin(x)) - 1 - x/5")
T4 = Problem("t4", _t4, _t4p, "1", "1.1", "log(1 - x + x^2) + 4 sin(1 - x)")
B1 = Problem(
    "b1", _b1, _b1p, "1", "2", "z^3 - 1/z", roots=("1", "-1", "1j", "-1j"), complex_ok=True
)

_SUITE = (T1, T2, T3, T4, B1)


def builtin_suite():
    return list(_SUITE)


def get_problem(problem_id):
    for p in _SUITE:
        if p.id == problem_id:
            return p
    raise KeyError(f"unknown problem id {problem_id!r}; choose from {[p.id for p in _SUITE]}")


def shifted_exponential(root="0.2", x0="0.3"):
    """f(x) = exp(x - root) - 1: all c_k = 1/k!, so its error constants are nonzero."""
    def f(x):
        return mpmath.exp(x - mpf(root)) - 1

    def fp(x):
        return mpmath.exp(x - mpf(root))

    return Problem("exp-shift", f, fp, root, x0, f"exp(x - {root}) - 1", complex_ok=True)


def polynomial_problem(pid, coeffs, root, x0, description):
    """Problem for a polynomial given by ascending coefficients (used by tests and examples)."""
    coeffs = tuple(coeffs)
    dcoeffs = tuple(k * c for k, c in enumerate(coeffs))[1:]

    def horner(cs, x):
        acc = 0
        for c in reversed(cs):
            acc = acc * x + c
        return acc

    return Problem(
        pid,
        lambda x: horner(coeffs, x),
        lambda x: horner(dcoeffs, x),
        root,
        x0,
        description,
        complex_ok=True,
    )
