"""Differential polynomials in two space variables.

A :class:`DiffPoly2` is a finite sum of monomials ``c * eps^e * mu^m * prod u_{k1,k2}``
with Gaussian-rational coefficients.  Elements are stored fully expanded and
commutative; the Moyal star-product is an operation producing another such
expansion, never a stored shape.

Grading: ``deg u_{k1,k2} = (k1, k2)``, ``deg eps = (-1, 0)``, ``deg mu = (0, -1)``.
"""

from __future__ import annotations

import heapq
import json
from collections import Counter
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, Iterable, Iterator, Optional, Tuple

from .scalar import ONE, ZERO, Scalar, i_power

Var = Tuple[int, int]
Monomial = Tuple[int, int, Tuple[Var, ...]]  # (eps_exp, mu_exp, sorted vars with repetition)


class NotATotalDerivative(ValueError):
    pass


class EpsLeak(ValueError):
    """A negative power of eps escaped into a polynomial (non-Laurent) context."""


def _merge(a: Tuple[Var, ...], b: Tuple[Var, ...]) -> Tuple[Var, ...]:
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(a + b))


class DiffPoly2:
    __slots__ = ("_terms", "laurent", "_hash")

    def __init__(self, terms: Optional[Dict[Monomial, Scalar]] = None, laurent: bool = False):
        clean: Dict[Monomial, Scalar] = {}
        if terms:
            for mono, c in terms.items():
                c = Scalar.coerce(c)
                if c:
                    clean[mono] = c
        self._terms = clean
        self.laurent = laurent
        self._hash = None
        if not laurent:
            self._check_eps()

    @classmethod
    def _wrap(cls, terms: Dict[Monomial, Scalar], laurent: bool) -> "DiffPoly2":
        # terms are trusted to be canonical and zero-free
        p = object.__new__(cls)
        p._terms = terms
        p.laurent = laurent
        p._hash = None
        if not laurent:
            p._check_eps()
        return p

    def _check_eps(self):
        for e, _, _ in self._terms:
            if e < 0:
                raise EpsLeak(f"negative eps exponent {e} outside a Laurent context")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, laurent: bool = False) -> "DiffPoly2":
        return cls._wrap({}, laurent)

    @classmethod
    def const(cls, c, eps: int = 0, mu: int = 0, laurent: bool = False) -> "DiffPoly2":
        return cls({(eps, mu, ()): Scalar.coerce(c)}, laurent=laurent)

    @classmethod
    def one(cls, laurent: bool = False) -> "DiffPoly2":
        return cls.const(1, laurent=laurent)

    @classmethod
    def u(cls, k1: int = 0, k2: int = 0, coeff=1, eps: int = 0, mu: int = 0,
          laurent: bool = False) -> "DiffPoly2":
        if k1 < 0 or k2 < 0:
            raise ValueError("derivative orders must be nonnegative")
        return cls({(eps, mu, ((k1, k2),)): Scalar.coerce(coeff)}, laurent=laurent)

    @classmethod
    def monomial(cls, vars: Iterable[Var], coeff=1, eps: int = 0, mu: int = 0,
                 laurent: bool = False) -> "DiffPoly2":
        return cls({(eps, mu, tuple(sorted(tuple(v) for v in vars))): Scalar.coerce(coeff)},
                   laurent=laurent)

    def as_laurent(self, flag: bool = True) -> "DiffPoly2":
        return DiffPoly2._wrap(dict(self._terms), flag)

    # -- container protocol -------------------------------------------------

    def items(self) -> Iterator[Tuple[Monomial, Scalar]]:
        """Terms in canonical order, lexicographic on (eps, mu, vars)."""
        for mono in sorted(self._terms):
            yield mono, self._terms[mono]

    def __iter__(self):
        return iter(sorted(self._terms))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def coeff(self, mono: Monomial) -> Scalar:
        return self._terms.get(mono, ZERO)

    @property
    def terms(self) -> Dict[Monomial, Scalar]:
        return dict(self._terms)

    def __eq__(self, other):
        if isinstance(other, DiffPoly2):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction, Scalar)):
            return self == DiffPoly2.const(other) if other else not self._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- ring operations ----------------------------------------------------

    def __neg__(self):
        return DiffPoly2._wrap({m: -c for m, c in self._terms.items()}, self.laurent)

    def __add__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return DiffPoly2._wrap(out, self.laurent or other.laurent)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "DiffPoly2":
        c = Scalar.coerce(c)
        if not c:
            return DiffPoly2.zero(self.laurent)
        return DiffPoly2._wrap({m: v * c for m, v in self._terms.items()}, self.laurent)

    def mul(self, other: "DiffPoly2", eps_shift: int = 0, mu_shift: int = 0,
            eps_max: Optional[int] = None, mu_max: Optional[int] = None,
            max_factors: Optional[int] = None) -> "DiffPoly2":
        """Commutative product times ``eps^eps_shift mu^mu_shift``, optionally truncated."""
        out: Dict[Monomial, Scalar] = {}
        for (e1, m1, v1), c1 in self._terms.items():
            for (e2, m2, v2), c2 in other._terms.items():
                e = e1 + e2 + eps_shift
                m = m1 + m2 + mu_shift
                if mu_max is not None and m > mu_max:
                    continue
                if eps_max is not None and e > eps_max:
                    continue
                if max_factors is not None and len(v1) + len(v2) > max_factors:
                    continue
                key = (e, m, _merge(v1, v2))
                c = c1 * c2
                s = out.get(key)
                if s is None:
                    out[key] = c
                else:
                    s = s + c
                    if s:
                        out[key] = s
                    else:
                        del out[key]
        return DiffPoly2._wrap(out, self.laurent or other.laurent)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        if not isinstance(other, DiffPoly2):
            return NotImplemented
        return self.mul(other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> "DiffPoly2":
        result = DiffPoly2.one(self.laurent)
        for _ in range(n):
            result = result * self
        return result

    def shift(self, eps: int = 0, mu: int = 0) -> "DiffPoly2":
        """Multiply by ``eps^eps * mu^mu``."""
        laurent = self.laurent or any(e + eps < 0 for e, _, _ in self._terms)
        return DiffPoly2._wrap({(e + eps, m + mu, v): c for (e, m, v), c in self._terms.items()},
                               laurent)

    # -- derivations --------------------------------------------------------

    def _derive(self, axis: int) -> "DiffPoly2":
        out: Dict[Monomial, Scalar] = {}
        for (e, m, vars), c in self._terms.items():
            counts = Counter(vars)
            for var, p in counts.items():
                raised = (var[0] + 1, var[1]) if axis == 0 else (var[0], var[1] + 1)
                rest = list(vars)
                rest.remove(var)
                rest.append(raised)
                key = (e, m, tuple(sorted(rest)))
                val = c * p
                s = out.get(key)
                if s is None:
                    out[key] = val
                else:
                    s = s + val
                    if s:
                        out[key] = s
                    else:
                        del out[key]
        return DiffPoly2._wrap(out, self.laurent)

    def dx(self, times: int = 1) -> "DiffPoly2":
        p = self
        for _ in range(times):
            p = p._derive(0)
        return p

    def dy(self, times: int = 1) -> "DiffPoly2":
        p = self
        for _ in range(times):
            p = p._derive(1)
        return p

    def derivatives(self, max_order: int) -> Dict[Var, "DiffPoly2"]:
        """Table ``{(a, b): dx^a dy^b self}`` for ``a + b <= max_order``."""
        table = {(0, 0): self}
        for b in range(max_order + 1):
            if b:
                table[(0, b)] = table[(0, b - 1)].dy()
            for a in range(1, max_order - b + 1):
                table[(a, b)] = table[(a - 1, b)].dx()
        return table

    # -- grading ------------------------------------------------------------

    def degrees(self) -> set:
        out = set()
        for e, m, vars in self._terms:
            out.add((sum(v[0] for v in vars) - e, sum(v[1] for v in vars) - m))
        return out

    def degree(self) -> Tuple[int, int]:
        """The common degree of all monomials; raises if inhomogeneous or zero."""
        degs = self.degrees()
        if len(degs) != 1:
            raise ValueError(f"not homogeneous: degrees {sorted(degs)}")
        return next(iter(degs))

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    # -- truncation and specialisation -------------------------------------

    def truncate(self, eps_max: Optional[int] = None, mu_max: Optional[int] = None) -> "DiffPoly2":
        return DiffPoly2._wrap(
            {mono: c for mono, c in self._terms.items()
             if (eps_max is None or mono[0] <= eps_max) and (mu_max is None or mono[1] <= mu_max)},
            self.laurent)

    def select(self, pred: Callable[[Monomial], bool]) -> "DiffPoly2":
        return DiffPoly2._wrap({m: c for m, c in self._terms.items() if pred(m)}, self.laurent)

    def at_mu_zero(self) -> "DiffPoly2":
        return self.select(lambda m: m[1] == 0)

    def min_mu(self) -> int:
        return min((m for _, m, _ in self._terms), default=0)

    def max_eps(self) -> int:
        return max((e for e, _, _ in self._terms), default=0)

    def is_real(self) -> bool:
        return all(c.is_real() for c in self._terms.values())

    def has_variables(self) -> bool:
        return any(v for _, _, v in self._terms)

    # -- evolutionary vector fields ----------------------------------------

    def evolve(self, flux: "DiffPoly2", eps_max: Optional[int] = None,
               mu_max: Optional[int] = None) -> "DiffPoly2":
        """Apply the evolutionary derivation with ``du_{k1,k2}/dt = dx^k1 dy^k2 flux``."""
        cache: Dict[Var, DiffPoly2] = {}

        def prolong(var: Var) -> DiffPoly2:
            if var not in cache:
                if var == (0, 0):
                    cache[var] = flux
                elif var[0] > 0:
                    cache[var] = prolong((var[0] - 1, var[1])).dx()
                else:
                    cache[var] = prolong((var[0], var[1] - 1)).dy()
            return cache[var]

        total = DiffPoly2.zero(self.laurent or flux.laurent)
        for (e, m, vars), c in self._terms.items():
            counts = Counter(vars)
            for var, p in counts.items():
                rest = list(vars)
                rest.remove(var)
                cofactor = DiffPoly2._wrap({(e, m, tuple(rest)): c * p}, self.laurent)
                total = total + cofactor.mul(prolong(var), eps_max=eps_max, mu_max=mu_max)
        return total

    # -- integration --------------------------------------------------------

    def x_integrate(self) -> "DiffPoly2":
        """Return ``g`` with ``dx(g) == self`` and no constant monomial.

        Triangular solve: with monomials ordered by their descending variable
        list, the leading monomial of ``dx(m)`` is ``m`` with its top variable
        raised, and this map is injective, so the leading monomial of an exact
        derivative fixes the next term of the antiderivative.
        """
        f = dict(self._terms)
        g: Dict[Monomial, Scalar] = {}

        def heap_key(mono):
            # max-heap via negation; lengths are compared before the var lists
            e, m, vars = mono
            return (-e, -m, -len(vars), tuple((-k1, -k2) for k1, k2 in sorted(vars, reverse=True)))

        heap = [(heap_key(mono), mono) for mono in f]
        heapq.heapify(heap)
        while heap:
            _, lead = heapq.heappop(heap)
            if lead not in f:
                continue
            e, m, vars = lead
            if not vars:
                raise NotATotalDerivative("constant term has no x-antiderivative")
            top = max(vars)
            if top[0] == 0:
                raise NotATotalDerivative(f"leading monomial {format_monomial(lead)} has no x-preimage")
            lowered = (top[0] - 1, top[1])
            rest = list(vars)
            rest.remove(top)
            pre_vars = tuple(sorted(rest + [lowered]))
            if max(pre_vars) != lowered:
                raise NotATotalDerivative(f"leading monomial {format_monomial(lead)} has no x-preimage")
            mult = pre_vars.count(lowered)
            c = f[lead] / mult
            pre = (e, m, pre_vars)
            g[pre] = g.get(pre, ZERO) + c
            step = DiffPoly2._wrap({pre: c}, True).dx()
            for mono, val in step._terms.items():
                if mono in f:
                    s = f[mono] - val
                    if s:
                        f[mono] = s
                    else:
                        del f[mono]
                else:
                    # every other term of dx(pre) sits below the lead
                    f[mono] = -val
                    heapq.heappush(heap, (heap_key(mono), mono))
        return DiffPoly2({k: v for k, v in g.items() if v}, laurent=self.laurent)

    # -- serialisation ------------------------------------------------------

    def to_json(self) -> dict:
        monos = []
        for (e, m, vars), c in self.items():
            counts = sorted(Counter(vars).items())
            monos.append({"eps": e, "mu": m, "coeff": c.to_json(),
                          "vars": [[k1, k2, p] for (k1, k2), p in counts]})
        return {"monomials": monos}

    @classmethod
    def from_json(cls, obj, laurent: bool = False) -> "DiffPoly2":
        terms = {}
        for item in obj["monomials"]:
            vars = []
            for k1, k2, p in item["vars"]:
                vars.extend([(k1, k2)] * p)
            key = (item["eps"], item["mu"], tuple(sorted(vars)))
            terms[key] = Scalar.from_json(item["coeff"])
        return cls(terms, laurent=laurent)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def loads(cls, s: str, laurent: bool = False) -> "DiffPoly2":
        return cls.from_json(json.loads(s), laurent=laurent)

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for mono, c in self.items():
            body = format_monomial(mono)
            parts.append(f"{c!r}" if body == "1" else (body if c == ONE else f"{c!r}*{body}"))
        return " + ".join(parts)


def format_monomial(mono: Monomial) -> str:
    e, m, vars = mono
    parts = []
    if e:
        parts.append("eps" if e == 1 else f"eps^{e}")
    if m:
        parts.append("mu" if m == 1 else f"mu^{m}")
    for (k1, k2), p in sorted(Counter(vars).items()):
        name = "u" if (k1, k2) == (0, 0) else f"u_{{{k1},{k2}}}"
        parts.append(name if p == 1 else f"{name}^{p}")
    return "*".join(parts) or "1"


def _coerce_poly(x):
    if isinstance(x, DiffPoly2):
        return x
    if isinstance(x, (int, Fraction, Scalar)):
        return DiffPoly2.const(x)
    return NotImplemented


def moyal_coefficient(k1: int, k2: int) -> Scalar:
    """Coefficient of ``eps^n mu^n (dx^k1 dy^k2 f)(dx^k2 dy^k1 g)`` in ``f*g``, ``n = k1 + k2``."""
    n = k1 + k2
    sign = -1 if k2 % 2 else 1
    return i_power(n) * Fraction(sign, 2 ** n * factorial(k1) * factorial(k2))


def moyal(f: DiffPoly2, g: DiffPoly2, order_cap: Optional[int] = None,
          mu_max: Optional[int] = None, eps_max: Optional[int] = None,
          max_factors: Optional[int] = None) -> DiffPoly2:
    """Moyal star-product ``f * g`` expanded into commutative canonical form.

    ``order_cap`` bounds the summation index (the power of ``i eps mu``);
    ``mu_max``/``eps_max`` discard output monomials above those exponents.  With
    no bound at all the series must terminate, which happens only when one of
    the factors has no ``u`` variables.  ``max_factors`` drops output monomials
    with more ``u`` factors than that.
    """
    laurent = f.laurent or g.laurent
    if not f or not g:
        return DiffPoly2.zero(laurent)
    if not f.has_variables() or not g.has_variables():
        return f.mul(g, eps_max=eps_max, mu_max=mu_max, max_factors=max_factors)
    cap = order_cap
    if mu_max is not None:
        room = mu_max - f.min_mu() - g.min_mu()
        if room < 0:
            return DiffPoly2.zero(laurent)
        cap = room if cap is None else min(cap, room)
    if cap is None:
        if f.has_variables() and g.has_variables():
            raise ValueError("unbounded Moyal product of two non-constant polynomials; give order_cap or mu_max")
        cap = 0
    if max_factors is not None:
        f_room = max_factors - min(len(v) for _, _, v in g._terms)
        g_room = max_factors - min(len(v) for _, _, v in f._terms)
        f = f.select(lambda m: len(m[2]) <= f_room)
        g = g.select(lambda m: len(m[2]) <= g_room)
        if not f or not g:
            return DiffPoly2.zero(laurent)
    if mu_max is not None:
        df = _pruned_derivatives(f, cap, mu_max - g.min_mu())
        dg = _pruned_derivatives(g, cap, mu_max - f.min_mu())
    else:
        df = f.derivatives(cap)
        dg = g.derivatives(cap)
    total: Dict[Monomial, Scalar] = {}
    for n in range(cap + 1):
        for k1 in range(n + 1):
            k2 = n - k1
            a = df[(k1, k2)]
            b = dg[(k2, k1)]
            if not a or not b:
                continue
            part = a.mul(b, eps_shift=n, mu_shift=n, eps_max=eps_max, mu_max=mu_max,
                         max_factors=max_factors)
            c = moyal_coefficient(k1, k2)
            for mono, val in part._terms.items():
                s = total.get(mono, ZERO) + val * c
                if s:
                    total[mono] = s
                else:
                    total.pop(mono, None)
    return DiffPoly2._wrap(total, laurent)


def _pruned_derivatives(f: DiffPoly2, max_order: int, mu_room: int) -> Dict[Var, DiffPoly2]:
    """Derivative table where order ``n`` keeps only terms with ``mu <= mu_room - n``.

    Those are the only terms that survive a Moyal term of order ``n`` under
    the output cap, and pruning before differentiating saves most of the work.
    """
    table: Dict[Var, DiffPoly2] = {(0, 0): f}
    for n in range(1, max_order + 1):
        room = mu_room - n
        for k1 in range(n + 1):
            k2 = n - k1
            parent = table[(k1 - 1, k2)] if k1 else table[(k1, k2 - 1)]
            parent = parent.select(lambda m: m[1] <= room)
            table[(k1, k2)] = parent.dx() if k1 else parent.dy()
    return table


def commutative(f: DiffPoly2, g: DiffPoly2, order_cap: Optional[int] = None,
                mu_max: Optional[int] = None, eps_max: Optional[int] = None,
                max_factors: Optional[int] = None) -> DiffPoly2:
    """Ordinary product with the same signature as :func:`moyal`."""
    return f.mul(g, eps_max=eps_max, mu_max=mu_max, max_factors=max_factors)


def star_power(f: DiffPoly2, n: int, mu_max: Optional[int] = None,
               eps_max: Optional[int] = None) -> DiffPoly2:
    """Left-nested star power ``((f*f)*f)*...`` with ``n`` factors."""
    if n < 1:
        raise ValueError("star_power needs n >= 1")
    result = f
    for _ in range(n - 1):
        result = moyal(result, f, mu_max=mu_max, eps_max=eps_max)
    return result


def odd_even_parts(p: DiffPoly2) -> Tuple[DiffPoly2, DiffPoly2]:
    """Split by parity of the mu exponent (the Moyal order in a star product)."""
    return p.select(lambda m: m[1] % 2 == 1), p.select(lambda m: m[1] % 2 == 0)


U = DiffPoly2.u()
