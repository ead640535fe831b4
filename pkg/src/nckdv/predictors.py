"""Closed-form generating series and independent oracles.

``S(z) = sum_k z^{2k} / (2^{2k} (2k+1)!)`` and ``T(a, z) = S(z) / S(az)`` with
``T = sum_g Q_g(a) z^{2g}``.  Coefficients that depend on the integer mode
``a`` are kept as exact polynomials (:class:`Poly1`), so ``Q_g`` is a
polynomial rather than a table of values.

The Witten numbers come from the DVV recursion, which never touches the Lax
pipeline and so serves as an oracle for the solver.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial
from typing import Iterable, List, Optional, Sequence, Tuple, Union

__all__ = [
    "Poly1", "PowerSeries1", "MissingEntry", "series_S", "series_T", "series_T_poly",
    "series_bg", "Q", "Q_inv", "one_psi_pixton", "one_psi_poly", "one_psi_T",
    "witten_one_point", "bssz", "dvv_intersection", "rjg", "check_rjg",
]


class MissingEntry(KeyError):
    pass


class Poly1:
    """Polynomial in one variable ``a`` with exact rational coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [Fraction(x) for x in coeffs]
        while c and not c[-1]:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def const(cls, x) -> "Poly1":
        return cls([x])

    @classmethod
    def monomial(cls, k: int, x=1) -> "Poly1":
        return cls([0] * k + [x])

    @staticmethod
    def _lift(x) -> "Poly1":
        return x if isinstance(x, Poly1) else Poly1.const(x)

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if isinstance(other, Poly1):
            return self.c == other.c
        if isinstance(other, (int, Fraction)):
            return self.c == Poly1.const(other).c
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def __add__(self, other):
        other = self._lift(other)
        n = max(len(self.c), len(other.c))
        return Poly1([(self.c[i] if i < len(self.c) else 0) + (other.c[i] if i < len(other.c) else 0)
                      for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly1([-x for x in self.c])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly1):
            return Poly1([x * other for x in self.c])
        if not self.c or not other.c:
            return Poly1()
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x:
                for j, y in enumerate(other.c):
                    out[i + j] += x * y
        return Poly1(out)

    __rmul__ = __mul__

    def __call__(self, a) -> Fraction:
        total = Fraction(0)
        for x in reversed(self.c):
            total = total * a + x
        return total

    def coeff(self, k: int) -> Fraction:
        return self.c[k] if 0 <= k < len(self.c) else Fraction(0)

    def is_even(self) -> bool:
        return all(not x for x in self.c[1::2])

    def __repr__(self):
        if not self.c:
            return "0"
        parts = []
        for k, x in enumerate(self.c):
            if x:
                parts.append(str(x) if k == 0 else f"{x}*a^{k}")
        return " + ".join(parts)


Coeff = Union[Fraction, Poly1]


class PowerSeries1:
    """Truncated series ``sum_{k<=order} c_k z^k``; coefficients are rationals or :class:`Poly1`."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Sequence[Coeff], order: int):
        if order < 0:
            raise ValueError("order must be >= 0")
        c = list(coeffs[:order + 1])
        while c and not c[-1]:
            c.pop()
        self.coeffs = c
        self.order = order

    def coeff(self, k: int) -> Coeff:
        if k > self.order:
            raise ValueError(f"coefficient {k} beyond series order {self.order}")
        return self.coeffs[k] if k < len(self.coeffs) else Fraction(0)

    def __eq__(self, other):
        if not isinstance(other, PowerSeries1):
            return NotImplemented
        n = min(self.order, other.order)
        return all(self.coeff(k) == other.coeff(k) for k in range(n + 1))

    def __add__(self, other: "PowerSeries1") -> "PowerSeries1":
        n = min(self.order, other.order)
        return PowerSeries1([self.coeff(k) + other.coeff(k) for k in range(n + 1)], n)

    def __sub__(self, other: "PowerSeries1") -> "PowerSeries1":
        n = min(self.order, other.order)
        return PowerSeries1([self.coeff(k) - other.coeff(k) for k in range(n + 1)], n)

    def __mul__(self, other):
        if not isinstance(other, PowerSeries1):
            return PowerSeries1([x * other for x in self.coeffs], self.order)
        n = min(self.order, other.order)
        out: List[Coeff] = [Fraction(0)] * (n + 1)
        for i, x in enumerate(self.coeffs):
            if not x:
                continue
            for j, y in enumerate(other.coeffs[:n + 1 - i]):
                if y:
                    out[i + j] = out[i + j] + x * y
        return PowerSeries1(out, n)

    def inverse(self) -> "PowerSeries1":
        """``1/self`` for a series with constant term 1."""
        if self.coeff(0) != 1:
            raise ZeroDivisionError("series inversion needs constant term 1")
        inv: List[Coeff] = [Fraction(1)]
        for k in range(1, self.order + 1):
            acc = Fraction(0)
            for i in range(1, k + 1):
                c = self.coeff(i)
                if c:
                    acc = acc + c * inv[k - i]
            inv.append(-acc)
        return PowerSeries1(inv, self.order)

    def __truediv__(self, other: "PowerSeries1") -> "PowerSeries1":
        return self * other.inverse()

    def dilate(self, c: Coeff) -> "PowerSeries1":
        """``f(c z)``."""
        out, p = [], Fraction(1)
        for x in self.coeffs:
            out.append(x * p)
            p = p * c
        return PowerSeries1(out, self.order)

    def __repr__(self):
        terms = [f"({x})*z^{k}" for k, x in enumerate(self.coeffs) if x]
        return (" + ".join(terms) or "0") + f" + O(z^{self.order + 1})"


# -- S, T, Q ----------------------------------------------------------------


def series_S(order: int) -> PowerSeries1:
    c = [Fraction(0)] * (order + 1)
    for k in range(0, order // 2 + 1):
        c[2 * k] = Fraction(1, 4 ** k * factorial(2 * k + 1))
    return PowerSeries1(c, order)


def series_T(a, order: int) -> PowerSeries1:
    """``S(z)/S(az)`` at an integer (or rational) ``a``."""
    return series_S(order) / series_S(order).dilate(Fraction(a))


@lru_cache(maxsize=None)
def series_T_poly(order: int) -> PowerSeries1:
    """``S(z)/S(az)`` with coefficients in Q[a]."""
    S = series_S(order)
    return S / S.dilate(Poly1.monomial(1))


@lru_cache(maxsize=None)
def _T_inv_poly(order: int) -> PowerSeries1:
    S = series_S(order)
    return S.dilate(Poly1.monomial(1)) / S


def Q(g: int) -> Poly1:
    """``Q_g(a)``: the coefficient of ``z^{2g}`` in ``T(a, z)``."""
    if g < 0:
        raise ValueError("g must be >= 0")
    return Poly1._lift(series_T_poly(2 * g).coeff(2 * g))


def Q_inv(g: int) -> Poly1:
    """Coefficient of ``z^{2g}`` in ``1/T(a, z) = S(az)/S(z)``."""
    if g < 0:
        raise ValueError("g must be >= 0")
    return Poly1._lift(_T_inv_poly(2 * g).coeff(2 * g))


def series_bg(order: int) -> PowerSeries1:
    """``1/S(iz) = 1 + sum_g b_g z^{2g}``; ``i^2 = -1`` is folded into the signs."""
    return series_S_iz(order).inverse()


def series_S_iz(order: int) -> PowerSeries1:
    S = series_S(order)
    return PowerSeries1([x * (-1) ** (k // 2) for k, x in enumerate(S.coeffs)], order)


# -- one-psi numbers ----------------------------------------------------------


def _check_gj(g: int, j: int):
    if g < 1 or not 0 <= j <= g:
        raise ValueError(f"need g >= 1 and 0 <= j <= g, got g={g}, j={j}")


def one_psi_poly(g: int, j: int) -> Poly1:
    """Predicted ``int 2^-j P_g^j(a,-a) psi_1^{3g-1-j}`` as a polynomial in ``a``.

    The generator ``(S(a mu z)/S(mu z) e^{z^3/24} - 1)/z`` has coefficient
    ``Q_inv(j) / (24^{g-j} (g-j)!)`` at ``mu^{2j} z^{3g-1-j}``.
    """
    _check_gj(g, j)
    return Q_inv(j) * Fraction(1, 24 ** (g - j) * factorial(g - j))


def one_psi_pixton(g: int, j: int, a) -> Fraction:
    return one_psi_poly(g, j)(a)


def one_psi_T(g: int, j: int, a) -> Fraction:
    """``T^j_g(a)``, the predicted ``int 2^-j P_g^j(a,-a,0) psi_1^{3g-j}``.

    The string equation moves the extra point onto the two-point number, so
    this agrees with :func:`one_psi_pixton`; genus 0 is the unit seed.
    """
    if g == 0 and j == 0:
        return Fraction(1)
    return one_psi_pixton(g, j, a)


def witten_one_point(g: int) -> Fraction:
    """``<tau_{3g-2}>_g`` from ``(e^{z^3/24} - 1)/z^2``."""
    if g < 1:
        raise ValueError("g must be >= 1")
    return Fraction(1, 24 ** g * factorial(g))


def bssz(g: int, a) -> Fraction:
    """Coefficient of ``mu^{2g}`` in ``S(a mu)/S(mu) - 1``."""
    if g < 1:
        raise ValueError("g must be >= 1")
    return Q_inv(g)(a)


# -- DVV oracle ---------------------------------------------------------------


def _dfact(k: int) -> int:
    # (2m-1)!! with (-1)!! = 1
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def dvv_intersection(g: int, D: Iterable[int]) -> Fraction:
    """``<tau_{d_1} ... tau_{d_n}>_g``; zero off the dimension constraint."""
    D = tuple(sorted(int(d) for d in D))
    if g < 0 or any(d < 0 for d in D):
        return Fraction(0)
    return _dvv(g, D)


# <tau_1>_1 is not produced by the recursion itself; DVV applied to
# <tau_2 tau_0>_1 gives (3x + 1/2)/15 while the string equation requires x,
# so x = 1/24.
_TAU1_GENUS1 = Fraction(1, 2) / 12


@lru_cache(maxsize=None)
def _dvv(g: int, D: Tuple[int, ...]) -> Fraction:
    n = len(D)
    if 2 * g - 2 + n <= 0 or sum(D) != 3 * g - 3 + n:
        return Fraction(0)
    if g == 0 and D == (0, 0, 0):
        return Fraction(1)
    if g == 1 and D == (1,):
        return _TAU1_GENUS1
    # D is sorted, so the last entry is the largest; it is >= 1 here
    k = D[-1] - 1
    rest = D[:-1]
    total = Fraction(0)
    for idx, d in enumerate(rest):
        others = rest[:idx] + rest[idx + 1:]
        coef = Fraction(_dfact(2 * k + 2 * d + 1), _dfact(2 * d - 1))
        total += coef * dvv_intersection(g, others + (d + k,))
    half = Fraction(0)
    for r in range(k):
        s = k - 1 - r
        w = _dfact(2 * r + 1) * _dfact(2 * s + 1)
        if g >= 1:
            half += w * dvv_intersection(g - 1, rest + (r, s))
        idxs = range(len(rest))
        for size in range(len(rest) + 1):
            for I in combinations(idxs, size):
                Iset = set(I)
                left = tuple(rest[i] for i in I)
                right = tuple(rest[i] for i in idxs if i not in Iset)
                for g1 in range(g + 1):
                    v1 = dvv_intersection(g1, left + (r,))
                    if v1:
                        half += w * v1 * dvv_intersection(g - g1, right + (s,))
    total += half / 2
    return total / _dfact(2 * k + 3)


# -- R^j_g --------------------------------------------------------------------


def rjg(g: int, j: int, a, table=None) -> Fraction:
    """``R^j_g(a) = sum_h T^{j-h}_{g-h}(a) Q_h(a)``.

    ``table`` may be anything with ``value(g, j, A, D)``; the (g,3) entries
    ``(a,-a,0)`` with descendants ``(3g-j,0,0)`` are read from it.  Without a
    table the closed-form predictions are used.
    """
    if not 0 <= j <= g:
        raise ValueError("need 0 <= j <= g")
    total = Fraction(0)
    for h in range(j + 1):
        gg, jj = g - h, j - h
        if table is None:
            t = one_psi_T(gg, jj, a)
        else:
            A = (a, -a, 0)
            Dv = (3 * gg - jj, 0, 0)
            try:
                t = table.value(gg, jj, A, Dv)
            except KeyError as exc:
                raise MissingEntry(f"no table entry for g={gg}, j={jj}, A={A}, D={Dv}") from exc
        total += Fraction(t) * Q(h)(a)
    return total


def check_rjg(g: int, j: int, a, table=None) -> bool:
    expected = Fraction(1, 24 ** g * factorial(g)) if j == 0 else Fraction(0)
    return rjg(g, j, a, table) == expected
