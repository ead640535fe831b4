"""Exact Gaussian rationals ``p + q*i`` with ``p, q`` in Q.

The parts are ``gmpy2.mpq`` values: the same exact arithmetic as
``fractions.Fraction`` (and they compare and hash equal to it) but several
times faster, which matters in the long Moyal expansions.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

_ZERO = mpq(0)
_ONE = mpq(1)
_EXACT = (int, mpq, Fraction)


def _frac(x) -> mpq:
    if isinstance(x, mpq):
        return x
    if isinstance(x, (int, Rational, str)):
        return mpq(x)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def frac_str(x) -> str:
    """Lowest-terms ``p/q`` string (``p`` when the denominator is 1)."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class Scalar:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def coerce(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        return cls(x)

    @staticmethod
    def _raw(re: mpq, im: mpq) -> "Scalar":
        s = object.__new__(Scalar)
        s.re = re
        s.im = im
        return s

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return not self.im

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, _EXACT):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __neg__(self):
        return Scalar._raw(-self.re, -self.im)

    def __add__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, _EXACT):
                return Scalar._raw(self.re + other, self.im)
            return NotImplemented
        return Scalar._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, _EXACT):
                return Scalar._raw(self.re - other, self.im)
            return NotImplemented
        return Scalar._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, _EXACT):
                return Scalar._raw(self.re * other, self.im * other)
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b:
            if not d:
                return Scalar._raw(a * c, _ZERO)
            return Scalar._raw(a * c, a * d)
        if not d:
            return Scalar._raw(a * c, b * c)
        return Scalar._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self.re, -self.im)

    def inverse(self) -> "Scalar":
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("inverse of zero Scalar")
        return Scalar._raw(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, _EXACT):
            return Scalar._raw(self.re / other, self.im / other)
        return self * Scalar.coerce(other).inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def to_json(self) -> dict:
        return {"re": frac_str(self.re), "im": frac_str(self.im)}

    @classmethod
    def from_json(cls, obj) -> "Scalar":
        return cls(mpq(obj["re"]), mpq(obj["im"]))

    def __repr__(self):
        if not self.im:
            return frac_str(self.re)
        if not self.re:
            return f"{frac_str(self.im)}*i"
        sign = "+" if self.im > 0 else "-"
        return f"({frac_str(self.re)}{sign}{frac_str(abs(self.im))}*i)"


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)


def i_power(n: int) -> Scalar:
    """``i**n`` for any integer ``n``."""
    return (ONE, I, Scalar(-1), Scalar(0, -1))[n % 4]
