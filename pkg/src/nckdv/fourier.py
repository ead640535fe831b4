"""Fourier modes in ``y``: ``u = sum_a v^a e^{iay}``.

Substituting this into a differential polynomial sends ``u_{k1,k2}`` to
``(ia)^{k2} v^a_{k1}`` and turns the Moyal product into a product of mode
functions of ``x`` alone.  Modes are always concrete integers; symbolic
dependence on them is recovered later by fitting.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import product as cartesian
from math import factorial
from typing import Dict, Iterable, Optional, Sequence, Tuple

from .diffpoly import DiffPoly2
from .predictors import Q, Q_inv
from .scalar import I, ONE, ZERO, Scalar, i_power

Factor = Tuple[int, int]  # (mode a, x-derivative order k) for v^a_k
ModeMonomial = Tuple[int, int, Tuple[Factor, ...]]

__all__ = ["ModePoly", "ModeArityError", "mode_expand", "mode_component", "mode_moyal",
           "t_transform", "t_inverse_transform"]


class ModeArityError(ValueError):
    pass


class ModePoly:
    """Polynomial in ``v^a_k`` with every monomial of the same total mode."""

    __slots__ = ("_terms", "total_mode")

    def __init__(self, terms: Optional[Dict[ModeMonomial, Scalar]] = None, total_mode: int = 0):
        clean: Dict[ModeMonomial, Scalar] = {}
        for (e, m, factors), c in (terms or {}).items():
            c = Scalar.coerce(c)
            if not c:
                continue
            if e < 0 or m < 0:
                raise ValueError("eps and mu exponents must be >= 0")
            factors = tuple(sorted(factors))
            if sum(a for a, _ in factors) != total_mode:
                raise ValueError(f"monomial {factors} does not have total mode {total_mode}")
            key = (e, m, factors)
            s = clean.get(key, ZERO) + c
            if s:
                clean[key] = s
            else:
                clean.pop(key, None)
        self._terms = clean
        self.total_mode = total_mode

    @classmethod
    def variable(cls, a: int, k: int = 0, coeff=1, eps: int = 0, mu: int = 0) -> "ModePoly":
        return cls({(eps, mu, ((a, k),)): coeff}, a)

    @classmethod
    def zero(cls, total_mode: int = 0) -> "ModePoly":
        return cls({}, total_mode)

    def items(self):
        return sorted(self._terms.items())

    @property
    def terms(self) -> Dict[ModeMonomial, Scalar]:
        return dict(self._terms)

    def coeff(self, mono: ModeMonomial) -> Scalar:
        e, m, factors = mono
        return self._terms.get((e, m, tuple(sorted(factors))), ZERO)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if not isinstance(other, ModePoly):
            return NotImplemented
        if not self._terms and not other._terms:
            return True
        return self.total_mode == other.total_mode and self._terms == other._terms

    def _same_mode(self, other: "ModePoly") -> int:
        if self._terms and other._terms and self.total_mode != other.total_mode:
            raise ValueError(f"adding total modes {self.total_mode} and {other.total_mode}")
        return self.total_mode if self._terms else other.total_mode

    def __add__(self, other: "ModePoly") -> "ModePoly":
        mode = self._same_mode(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, ZERO) + c
        return ModePoly(out, mode)

    def __neg__(self):
        return ModePoly({k: -c for k, c in self._terms.items()}, self.total_mode)

    def __sub__(self, other: "ModePoly") -> "ModePoly":
        return self + (-other)

    def scale(self, c) -> "ModePoly":
        c = Scalar.coerce(c)
        return ModePoly({k: v * c for k, v in self._terms.items()}, self.total_mode)

    def shift(self, eps: int = 0, mu: int = 0) -> "ModePoly":
        return ModePoly({(e + eps, m + mu, f): c for (e, m, f), c in self._terms.items()},
                        self.total_mode)

    def __mul__(self, other):
        if not isinstance(other, ModePoly):
            return self.scale(other)
        out: Dict[ModeMonomial, Scalar] = {}
        for (e1, m1, f1), c1 in self._terms.items():
            for (e2, m2, f2), c2 in other._terms.items():
                key = (e1 + e2, m1 + m2, tuple(sorted(f1 + f2)))
                out[key] = out.get(key, ZERO) + c1 * c2
        return ModePoly(out, self.total_mode + other.total_mode)

    def dx(self, times: int = 1) -> "ModePoly":
        p = self
        for _ in range(times):
            out: Dict[ModeMonomial, Scalar] = {}
            for (e, m, factors), c in p._terms.items():
                for idx, (a, k) in enumerate(factors):
                    new = factors[:idx] + ((a, k + 1),) + factors[idx + 1:]
                    key = (e, m, tuple(sorted(new)))
                    out[key] = out.get(key, ZERO) + c
            p = ModePoly(out, p.total_mode)
        return p

    def truncate(self, eps_max: Optional[int] = None, mu_max: Optional[int] = None) -> "ModePoly":
        return ModePoly({k: c for k, c in self._terms.items()
                         if (eps_max is None or k[0] <= eps_max) and (mu_max is None or k[1] <= mu_max)},
                        self.total_mode)

    def to_json(self) -> dict:
        return {"total_mode": self.total_mode,
                "monomials": [{"eps": e, "mu": m, "coeff": c.to_json(),
                               "vars": [[a, k] for a, k in factors]}
                              for (e, m, factors), c in self.items()]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for (e, m, factors), c in self.items():
            bits = [repr(c)]
            if e:
                bits.append(f"eps^{e}")
            if m:
                bits.append(f"mu^{m}")
            bits.extend(f"v^{a}_{k}" for a, k in factors)
            parts.append("*".join(bits))
        return " + ".join(parts)


def _expand_monomial(vars: Sequence[Tuple[int, int]], modes: Sequence[int]) -> Tuple[Scalar, Tuple[Factor, ...]]:
    coeff = ONE
    factors = []
    for (k1, k2), a in zip(vars, modes):
        if k2:
            coeff = coeff * (i_power(k2) * Fraction(a) ** k2)
        factors.append((a, k1))
    return coeff, tuple(factors)


def mode_expand(f: DiffPoly2, modes: Sequence[int]) -> ModePoly:
    """Give the ``i``-th factor (canonical order) of every monomial the mode ``modes[i]``."""
    modes = tuple(int(a) for a in modes)
    out: Dict[ModeMonomial, Scalar] = {}
    for (e, m, vars), c in f.items():
        if e < 0:
            raise ValueError("mode expansion needs eps_exp >= 0")
        if len(vars) != len(modes):
            raise ModeArityError(f"monomial with {len(vars)} factors, {len(modes)} modes given")
        k, factors = _expand_monomial(vars, modes)
        key = (e, m, tuple(sorted(factors)))
        out[key] = out.get(key, ZERO) + c * k
    return ModePoly(out, sum(modes))


def mode_component(f: DiffPoly2, a: int, modes: Iterable[int]) -> ModePoly:
    """Coefficient of ``e^{iay}`` in ``f`` after ``u = sum_{b in modes} v^b e^{iby}``."""
    modes = sorted(set(int(b) for b in modes))
    out: Dict[ModeMonomial, Scalar] = {}
    for (e, m, vars), c in f.items():
        if e < 0:
            raise ValueError("mode expansion needs eps_exp >= 0")
        for assign in cartesian(modes, repeat=len(vars)):
            if sum(assign) != a:
                continue
            k, factors = _expand_monomial(vars, assign)
            if not k:
                continue
            key = (e, m, tuple(sorted(factors)))
            out[key] = out.get(key, ZERO) + c * k
    return ModePoly(out, a)


def mode_moyal(F: ModePoly, G: ModePoly, mu_max: int) -> ModePoly:
    """The Moyal product of ``F e^{iby}`` and ``G e^{icy}`` with ``dy`` replaced by ``i*mode``."""
    b, c = F.total_mode, G.total_mode
    total = ModePoly.zero(b + c)
    for n in range(mu_max + 1):
        for k1 in range(n + 1):
            k2 = n - k1
            coef = (i_power(n) * Fraction((-1) ** k2, 2 ** n * factorial(k1) * factorial(k2))
                    * i_power(n) * (Fraction(b) ** k2 * Fraction(c) ** k1))
            if not coef:
                continue
            total = total + (F.dx(k1) * G.dx(k2)).shift(n, n).scale(coef)
    return total.truncate(mu_max=mu_max)


def t_transform(a: int, p: ModePoly, eps_order: int) -> ModePoly:
    """``T(a, eps mu dx) p = sum_g Q_g(a) (eps mu)^{2g} dx^{2g} p`` for ``2g <= eps_order``."""
    total = ModePoly.zero(p.total_mode)
    for g in range(eps_order // 2 + 1):
        q = Q(g)(a)
        if q:
            total = total + p.dx(2 * g).shift(2 * g, 2 * g).scale(q)
    return total


def t_inverse_transform(a: int, p: ModePoly, eps_order: int) -> ModePoly:
    """``S(a eps mu dx)/S(eps mu dx) p``, the inverse of :func:`t_transform`."""
    total = ModePoly.zero(p.total_mode)
    for g in range(eps_order // 2 + 1):
        q = Q_inv(g)(a)
        if q:
            total = total + p.dx(2 * g).shift(2 * g, 2 * g).scale(q)
    return total
