"""Truncated pseudo-differential operators ``A = sum_i a_i * dx^i``.

Coefficients are Laurent-in-eps :class:`DiffPoly2` values and are multiplied
with the Moyal product (or, for the classical pipeline, the ordinary one).

Truncation.  ``depth_floor`` discards orders below it.  ``eps_max`` bounds the
Moyal order of the coefficients, which is their mu exponent: eps enters the
coefficients with negative powers through ``2 eps^-2 u`` so a raw eps cutoff is
not monotone under products, while the mu exponent only ever grows.  Since
every flow monomial satisfies ``eps_exp >= mu_exp``, dropping mu powers above
``eps_max`` loses nothing of eps order ``<= eps_max`` in the final flows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Optional

from .diffpoly import DiffPoly2, commutative, moyal


class TruncationMismatch(ValueError):
    pass


class NotMonicOrderTwo(ValueError):
    pass


@dataclass(frozen=True)
class Truncation:
    """``depth_floor`` and ``eps_max`` as above.

    ``max_factors`` optionally drops coefficient monomials with more ``u``
    factors.  Every ``u`` in a coefficient comes with ``eps^-2``, so for flow
    ``n`` a monomial with more than ``n + 1`` factors can only feed terms with
    a negative eps power, which must cancel; the bound is then exact.
    """

    depth_floor: int
    eps_max: int
    max_factors: Optional[int] = None

    def __post_init__(self):
        if self.depth_floor > 0:
            raise ValueError("depth_floor must be <= 0")
        if self.eps_max < 0:
            raise ValueError("eps_max must be >= 0")
        if self.max_factors is not None and self.max_factors < 1:
            raise ValueError("max_factors must be >= 1")

    @classmethod
    def for_flow(cls, n: int) -> "Truncation":
        return cls(depth_floor=-(2 * n + 3), eps_max=2 * n + 2, max_factors=n + 1)

    def deepened(self, by: int = 2) -> "Truncation":
        return Truncation(self.depth_floor - by, self.eps_max + by, self.max_factors)

    def with_eps_max(self, eps_max: int) -> "Truncation":
        return Truncation(self.depth_floor, eps_max, self.max_factors)

    def to_json(self) -> dict:
        out = {"depth": self.depth_floor, "eps_max": self.eps_max}
        if self.max_factors is not None:
            out["max_factors"] = self.max_factors
        return out


@lru_cache(maxsize=None)
def gen_binomial(i: int, k: int) -> Fraction:
    """``C(i, k)`` for any integer ``i`` and ``k >= 0``."""
    num = 1
    for t in range(k):
        num *= i - t
    den = 1
    for t in range(2, k + 1):
        den *= t
    return Fraction(num, den)


def _max_floor(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


class PsiDO:
    """Operator with coefficients stored for ``depth_floor <= i <= top_order``.

    ``exact_floor`` is the lowest order whose coefficient is unaffected by the
    depth truncation of the inputs it was computed from; ``None`` means the
    operator is known exactly (e.g. a differential operator given by hand).
    """

    __slots__ = ("coeffs", "trunc", "product", "exact_floor")

    def __init__(self, coeffs: Dict[int, DiffPoly2], trunc: Truncation, product: str = "moyal",
                 exact_floor: Optional[int] = None):
        if product not in ("moyal", "classical"):
            raise ValueError(f"unknown coefficient product {product!r}")
        self.trunc = trunc
        self.product = product
        self.exact_floor = exact_floor
        clean = {}
        for i, a in coeffs.items():
            if i < trunc.depth_floor:
                continue
            a = a.as_laurent().truncate(mu_max=trunc.eps_max)
            if trunc.max_factors is not None:
                a = a.select(lambda m: len(m[2]) <= trunc.max_factors)
            if a:
                clean[int(i)] = a
        self.coeffs = clean

    @property
    def top_order(self) -> Optional[int]:
        return max(self.coeffs) if self.coeffs else None

    def coeff(self, i: int) -> DiffPoly2:
        return self.coeffs.get(i, DiffPoly2.zero(True))

    @classmethod
    def identity(cls, trunc: Truncation, product: str = "moyal") -> "PsiDO":
        return cls({0: DiffPoly2.one(True)}, trunc, product)

    @classmethod
    def dx_power(cls, i: int, trunc: Truncation, product: str = "moyal") -> "PsiDO":
        return cls({i: DiffPoly2.one(True)}, trunc, product)

    def _star(self, f: DiffPoly2, g: DiffPoly2) -> DiffPoly2:
        prod = moyal if self.product == "moyal" else commutative
        return prod(f, g, mu_max=self.trunc.eps_max, max_factors=self.trunc.max_factors)

    def _check(self, other: "PsiDO"):
        if self.trunc != other.trunc:
            raise TruncationMismatch(f"{self.trunc} vs {other.trunc}")
        if self.product != other.product:
            raise TruncationMismatch(f"coefficient products differ: {self.product} vs {other.product}")

    def __eq__(self, other):
        if not isinstance(other, PsiDO):
            return NotImplemented
        return self.coeffs == other.coeffs and self.trunc == other.trunc

    def __add__(self, other: "PsiDO") -> "PsiDO":
        self._check(other)
        out = dict(self.coeffs)
        for i, b in other.coeffs.items():
            out[i] = out[i] + b if i in out else b
        return PsiDO(out, self.trunc, self.product, _max_floor(self.exact_floor, other.exact_floor))

    def __neg__(self) -> "PsiDO":
        return PsiDO({i: -a for i, a in self.coeffs.items()}, self.trunc, self.product, self.exact_floor)

    def __sub__(self, other: "PsiDO") -> "PsiDO":
        return self + (-other)

    def scale(self, c) -> "PsiDO":
        return PsiDO({i: a.scale(c) for i, a in self.coeffs.items()}, self.trunc, self.product,
                     self.exact_floor)

    def compose(self, other: "PsiDO", order_floor: Optional[int] = None) -> "PsiDO":
        """``(a dx^i) o (b dx^j) = sum_k C(i,k) (a * dx^k b) dx^(i+j-k)``.

        ``order_floor`` skips output orders below it (on top of depth_floor).
        """
        self._check(other)
        floor = self.trunc.depth_floor
        if order_floor is not None:
            floor = max(floor, order_floor)
        out: Dict[int, DiffPoly2] = {}
        dcache: Dict[tuple, DiffPoly2] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                kmax = i + j - floor
                if i >= 0:
                    kmax = min(kmax, i)
                for k in range(kmax + 1):
                    key = (j, k)
                    if key not in dcache:
                        dcache[key] = b if k == 0 else dcache[(j, k - 1)].dx()
                    db = dcache[key]
                    if not db:
                        break
                    term = self._star(a, db).scale(gen_binomial(i, k))
                    o = i + j - k
                    out[o] = out[o] + term if o in out else term
        exact = self._compose_floor(other, out)
        if order_floor is not None and order_floor > self.trunc.depth_floor:
            exact = order_floor if exact is None else max(exact, order_floor)
        return PsiDO(out, self.trunc, self.product, exact)

    def _compose_floor(self, other: "PsiDO", out) -> Optional[int]:
        floor = self.trunc.depth_floor
        bounds = [floor]
        if self.exact_floor is not None and other.coeffs:
            bounds.append(self.exact_floor + other.top_order)
        if other.exact_floor is not None and self.coeffs:
            bounds.append(other.exact_floor + self.top_order)
        # a product of exact operators is still cut at depth_floor
        exact_inputs = self.exact_floor is None and other.exact_floor is None
        if exact_inputs and (not self.coeffs or not other.coeffs or
                             (min(self.coeffs) >= 0 and min(other.coeffs) >= 0)):
            return None
        return max(bounds)

    __matmul__ = compose

    def positive_part(self) -> "PsiDO":
        part = {i: a for i, a in self.coeffs.items() if i >= 0}
        if self.exact_floor is None or self.exact_floor <= 0:
            return PsiDO(part, self.trunc, self.product)
        return PsiDO(part, self.trunc, self.product, self.exact_floor)

    def equal_within(self, other: "PsiDO") -> bool:
        """Equality of all coefficients at orders both operators know exactly."""
        floor = _max_floor(self.exact_floor, other.exact_floor)
        orders = set(self.coeffs) | set(other.coeffs)
        return all(self.coeff(i) == other.coeff(i) for i in orders if floor is None or i >= floor)

    def commutator(self, other: "PsiDO") -> "PsiDO":
        return self.compose(other) - other.compose(self)

    def _order_coefficient(self, left: Dict[int, DiffPoly2], right: Dict[int, DiffPoly2],
                           m: int) -> DiffPoly2:
        """Coefficient of ``dx^m`` in ``(sum left) o (sum right)``."""
        total = DiffPoly2.zero(True)
        for i, a in left.items():
            for j, b in right.items():
                k = i + j - m
                if k < 0 or (i >= 0 and k > i):
                    continue
                c = gen_binomial(i, k)
                if not c:
                    continue
                db = b.dx(k) if k else b
                if db:
                    total = total + self._star(a, db).scale(c)
        return total

    def sqrt(self, order_floor: Optional[int] = None) -> "PsiDO":
        """The unique ``B = dx + sum_{i<1} b_i dx^i`` with ``B o B = self``.

        Solved from the top: the ``dx^m`` coefficient of ``B o B`` is
        ``2 b_{m-1}`` plus terms in the already known ``b_i``, ``i >= m``.
        """
        if self.top_order != 2 or self.coeffs[2] != DiffPoly2.one(True):
            raise NotMonicOrderTwo("square root needs dx^2 + (lower order)")
        floor = self.trunc.depth_floor
        if order_floor is not None:
            floor = max(floor, order_floor)
        b: Dict[int, DiffPoly2] = {1: DiffPoly2.one(True)}
        for m in range(1, floor, -1):
            rest = self._order_coefficient(b, b, m)
            val = (self.coeff(m) - rest).scale(Fraction(1, 2))
            val = val.truncate(mu_max=self.trunc.eps_max)
            if self.trunc.max_factors is not None:
                val = val.select(lambda mono: len(mono[2]) <= self.trunc.max_factors)
            if val:
                b[m - 1] = val
        return PsiDO(b, self.trunc, self.product, floor)

    def power_half(self, n: int, order_floor: Optional[int] = None) -> "PsiDO":
        """``self^(n + 1/2)`` as ``self^n o self^(1/2)``.

        With ``order_floor`` only orders ``>= order_floor`` of the result are
        wanted; for a self of order 2 each left factor lifts the order of the
        terms it touches by 2, so the intermediate products are cut
        accordingly.
        """
        if order_floor is None:
            result = self.sqrt()
            for _ in range(n):
                result = self.compose(result)
            return result
        result = self.sqrt(order_floor - 2 * n)
        for k in range(1, n + 1):
            result = self.compose(result, order_floor - 2 * (n - k))
        return result

    def to_json(self) -> dict:
        return {"top_order": self.top_order,
                "coeffs": {str(i): self.coeffs[i].to_json() for i in sorted(self.coeffs, reverse=True)},
                "trunc": self.trunc.to_json()}

    @classmethod
    def from_json(cls, obj, product: str = "moyal") -> "PsiDO":
        trunc = Truncation(obj["trunc"]["depth"], obj["trunc"]["eps_max"], obj["trunc"].get("max_factors"))
        coeffs = {int(i): DiffPoly2.from_json(c, laurent=True) for i, c in obj["coeffs"].items()}
        return cls(coeffs, trunc, product)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({self.coeffs[i]!r})*d^{i}" for i in sorted(self.coeffs, reverse=True))
