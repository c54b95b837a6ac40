"""Precision-scoped arbitrary-precision scalars and finite differences.

Real values are mpmath ``mpf`` and complex values ``mpc``.  Working precision
is mpmath's context precision, so every computation that must run at a given
number of digits is wrapped in ``Precision.context()``.
"""

import re
from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpc, mpf

from .errors import DomainError, EvalError, ParseError, UnsupportedOrder

BigReal = mpf
BigComplex = mpc

_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_REAL_LITERAL = re.compile(rf"[+-]?{_NUMBER}")


@dataclass(frozen=True)
class Precision:
    """Working precision in significant decimal digits."""

    decimal_digits: int = 1800

    def __post_init__(self):
        if int(self.decimal_digits) != self.decimal_digits or self.decimal_digits < 16:
            raise ValueError(f"decimal_digits must be an integer >= 16, got {self.decimal_digits!r}")

    def context(self):
        return mp.workdps(self.decimal_digits)

    def tolerance(self):
        """10^(-digits/4): the default acceptance threshold for derived quantities."""
        with self.context():
            return mpf(10) ** (-mpf(self.decimal_digits) / 4)

    def guarded(self, factor=2):
        return Precision(self.decimal_digits * factor)


BENCH_PRECISION = Precision(1800)
BASIN_PRECISION = Precision(16)


def make_scalar(text, p):
    """Parse a signed decimal / scientific literal to the nearest value at precision ``p``."""
    s = str(text).strip()
    if not _REAL_LITERAL.fullmatch(s):
        raise ParseError(f"malformed real literal: {text!r}")
    with p.context():
        return +mpf(s)


def make_complex(text, p):
    """Parse ``a``, ``bj`` or ``a+bj`` (``i`` accepted for ``j``) at precision ``p``."""
    s = str(text).strip().replace(" ", "")
    if not s or s[-1] not in "jJiI":
        return make_scalar(s, p)
    body = s[:-1]
    split = None
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-" and body[k - 1] not in "eE":
            split = k
            break
    re_part, im_part = ("0", body) if split is None else (body[:split], body[split:])
    if im_part in ("", "+", "-"):
        im_part += "1"
    with p.context():
        return mpc(make_scalar(re_part, p), make_scalar(im_part, p))


class SplitComplex:
    """Complex float64 array held as separate real and imaginary parts.

    Every operation is composed of individually rounded float64 ufuncs, so an
    element's result never depends on its position in the array.  numpy's own
    complex loops may fuse multiply-adds in vectorised bodies but not in
    remainder loops, which breaks that guarantee.
    """

    __slots__ = ("re", "im")
    __array_priority__ = 1000

    def __init__(self, re, im=None):
        self.re = np.asarray(re, dtype=np.float64)
        self.im = np.zeros_like(self.re) if im is None else np.asarray(im, dtype=np.float64)

    @classmethod
    def from_complex(cls, z):
        z = np.asarray(z, dtype=np.complex128)
        return cls(z.real.copy(), z.imag.copy())

    def to_complex(self):
        return self.re + 1j * self.im

    @staticmethod
    def _parts(other):
        if isinstance(other, SplitComplex):
            return other.re, other.im
        c = complex(other)
        return np.float64(c.real), np.float64(c.imag)

    def __len__(self):
        return len(self.re)

    @property
    def shape(self):
        return self.re.shape

    def __getitem__(self, idx):
        return SplitComplex(self.re[idx], self.im[idx])

    def __setitem__(self, idx, value):
        re, im = self._parts(value)
        self.re[idx] = re
        self.im[idx] = im

    def __neg__(self):
        return SplitComplex(-self.re, -self.im)

    def __pos__(self):
        return self

    def __add__(self, other):
        re, im = self._parts(other)
        return SplitComplex(self.re + re, self.im + im)

    __radd__ = __add__

    def __sub__(self, other):
        re, im = self._parts(other)
        return SplitComplex(self.re - re, self.im - im)

    def __rsub__(self, other):
        re, im = self._parts(other)
        return SplitComplex(re - self.re, im - self.im)

    def __mul__(self, other):
        re, im = self._parts(other)
        rr = self.re * re
        ii = self.im * im
        ri = self.re * im
        ir = self.im * re
        return SplitComplex(rr - ii, ri + ir)

    __rmul__ = __mul__

    @staticmethod
    def _div(ar, ai, br, bi):
        # Smith's algorithm
        with np.errstate(all="ignore"):
            big = np.abs(br) >= np.abs(bi)
            r1 = bi / br
            d1 = br + bi * r1
            r2 = br / bi
            d2 = br * r2 + bi
            re = np.where(big, (ar + ai * r1) / d1, (ar * r2 + ai) / d2)
            im = np.where(big, (ai - ar * r1) / d1, (ai * r2 - ar) / d2)
        return SplitComplex(re, im)

    def __truediv__(self, other):
        re, im = self._parts(other)
        return self._div(self.re, self.im, re, im)

    def __rtruediv__(self, other):
        re, im = self._parts(other)
        return self._div(re, im, self.re, self.im)

    def __pow__(self, n):
        if isinstance(n, int) and not isinstance(n, bool):
            if n < 0:
                return 1 / self**-n
            out, base = SplitComplex(np.ones_like(self.re)), self
            while n:
                if n & 1:
                    out = out * base
                n >>= 1
                if n:
                    base = base * base
            return out
        return (self.log() * n).exp()

    def log(self):
        with np.errstate(all="ignore"):
            return SplitComplex(np.log(np.hypot(self.re, self.im)), np.arctan2(self.im, self.re))

    def exp(self):
        with np.errstate(all="ignore"):
            m = np.exp(self.re)
            return SplitComplex(m * np.cos(self.im), m * np.sin(self.im))

    def __eq__(self, other):
        re, im = self._parts(other)
        return (self.re == re) & (self.im == im)

    def __ne__(self, other):
        return ~(self == other)

    __hash__ = None

    def isfinite(self):
        return np.isfinite(self.re) & np.isfinite(self.im)

    def abs2(self):
        with np.errstate(over="ignore"):
            return self.re * self.re + self.im * self.im


def is_array(x):
    return isinstance(x, (np.ndarray, SplitComplex))


def where(mask, a, b):
    """Elementwise select that also handles SplitComplex operands."""
    if any(isinstance(v, SplitComplex) for v in (a, b)):
        ar, ai = SplitComplex._parts(a)
        br, bi = SplitComplex._parts(b)
        return SplitComplex(np.where(mask, ar, br), np.where(mask, ai, bi))
    return np.where(mask, a, b)


def is_exact_zero(x):
    """True for a scalar that is exactly zero; arrays are never treated as zero."""
    return not is_array(x) and x == 0


def default_fd_step(k, digits=None):
    """Step 10^(-d/(k+2)) that balances O(h^2) truncation against rounding for order k."""
    d = mp.dps if digits is None else digits
    return mpf(10) ** (-mpf(d) / (max(k, 2) + 2))


# Central stencils: (offset multiple of h, weight) and the power of h to divide by.
_STENCILS = {
    0: (((0, 1),), 0, 1),
    1: (((1, 1), (-1, -1)), 1, 2),
    2: (((1, 1), (0, -2), (-1, 1)), 2, 1),
    3: (((2, 1), (1, -2), (-1, 2), (-2, -1)), 3, 2),
    4: (((2, 1), (1, -4), (0, 6), (-1, -4), (-2, 1)), 4, 1),
}


def nth_derivative_fd(g, k, x0, h=None):
    """Central-difference estimate of the k-th derivative of ``g`` at ``x0``.

    Truncation error is O(h^2).  When ``h`` is omitted a step suited to the
    current working precision and derivative order is used.
    """
    if k not in _STENCILS:
        raise UnsupportedOrder(f"derivative order {k} not supported (0..4)")
    x0 = mpf(x0)
    h = default_fd_step(k) if h is None else mpf(h)
    if h <= 0:
        raise ValueError("step h must be positive")
    taps, power, scale = _STENCILS[k]
    total = mpf(0)
    for offset, weight in taps:
        try:
            value = g(x0 + offset * h)
        except (ZeroDivisionError, ValueError, ArithmeticError, DomainError) as exc:
            raise EvalError(f"cannot evaluate at x0{offset:+d}h: {exc}") from exc
        total += weight * value
    return total / (scale * h**power)
