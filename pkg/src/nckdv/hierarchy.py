"""The ncKdV flows ``du/dt_n = dx P_n`` from the Lax operator ``L = dx^2 + 2 eps^-2 u``.

``P_n`` is an infinite series in ``eps mu``; every published flow is cut at
``eps_exp <= trunc.eps_max``.  The flows are built once per truncation and
cached, since the commutativity checks reuse them.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, Iterable, List, Optional

from .diffpoly import DiffPoly2, NotATotalDerivative, star_power
from .psido import PsiDO, Truncation

__all__ = [
    "CommutatorNotOrderZero", "TruncationTooShallow", "NotATotalDerivative", "FlowTable",
    "double_factorial", "lax_operator", "flow", "classical_flow", "dispersionless_flow",
    "genus_part", "genus_parts", "check_shape", "check_commutativity", "commutator_defect",
]


class CommutatorNotOrderZero(ArithmeticError):
    pass


class TruncationTooShallow(ArithmeticError):
    pass


def double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def lax_operator(trunc: Truncation, product: str = "moyal") -> PsiDO:
    return PsiDO({2: DiffPoly2.one(True), 0: DiffPoly2.u(coeff=2, eps=-2, laurent=True)},
                 trunc, product)


def _resolve(n: int, trunc: Optional[Truncation]) -> Truncation:
    if n < 1:
        raise ValueError("flow index must be >= 1")
    return trunc if trunc is not None else Truncation.for_flow(n)


@lru_cache(maxsize=None)
def _lax_flow(n: int, trunc: Truncation, product: str) -> DiffPoly2:
    L = lax_operator(trunc, product)
    # only the positive part is used, so orders below 0 are never formed
    half = L.power_half(n, order_floor=0)
    if half.exact_floor is not None and half.exact_floor > 0:
        raise TruncationTooShallow(f"L^({n}+1/2) is exact only down to order {half.exact_floor}")
    R = half.positive_part().commutator(L)
    stray = sorted(i for i in R.coeffs if i != 0)
    if stray:
        raise CommutatorNotOrderZero(f"commutator has orders {stray}")
    scale = Fraction(1, 2 * double_factorial(2 * n + 1))
    r0 = R.coeff(0).shift(eps=2 * n + 2).scale(scale)
    r0 = r0.truncate(eps_max=trunc.eps_max)
    # drops the Laurent flag; raises EpsLeak if a negative eps power survived
    return DiffPoly2(r0.terms, laurent=False).x_integrate()


def flow(n: int, trunc: Optional[Truncation] = None) -> DiffPoly2:
    """``P_n`` with ``du/dt_n = dx P_n``, built with the Moyal coefficient product."""
    return _lax_flow(n, _resolve(n, trunc), "moyal")


def classical_flow(n: int, trunc: Optional[Truncation] = None) -> DiffPoly2:
    """Same Lax pipeline with the ordinary commutative product in the coefficients."""
    return _lax_flow(n, _resolve(n, trunc), "classical")


def dispersionless_flow(n: int, eps_max: Optional[int] = None) -> DiffPoly2:
    """``u^{*(n+1)}/(n+1)!``; ``eps_max`` defaults to the flow-n truncation."""
    if n < 1:
        raise ValueError("flow index must be >= 1")
    if eps_max is None:
        eps_max = Truncation.for_flow(n).eps_max
    return star_power(DiffPoly2.u(), n + 1, mu_max=eps_max, eps_max=eps_max).scale(
        Fraction(1, factorial(n + 1)))


def genus_part(p: DiffPoly2, g: int) -> DiffPoly2:
    """``P_{n,g}``: the monomials with ``eps_exp - mu_exp == 2g``.

    The ``(eps mu)^k`` factors produced by the star product carry no genus, so
    the genus is read off the eps power left over after pairing with mu.
    """
    return p.select(lambda m: m[0] - m[1] == 2 * g)


def genus_parts(p: DiffPoly2) -> Dict[int, DiffPoly2]:
    parts: Dict[int, DiffPoly2] = {}
    for g in sorted({(e - m) // 2 for e, m, _ in p.terms}):
        parts[g] = genus_part(p, g)
    return parts


def check_shape(n: int, p: DiffPoly2) -> List[str]:
    """Violations of the ``P_{n,g}`` shape: ``n+1-g`` factors and ``2g`` excess x-derivatives."""
    problems = []
    for (e, m, vars), c in p.items():
        if (e - m) % 2:
            problems.append(f"odd genus weight in eps^{e} mu^{m}")
            continue
        g = (e - m) // 2
        if not 0 <= g <= n:
            problems.append(f"genus {g} out of range in eps^{e} mu^{m}")
        if len(vars) != n + 1 - g:
            problems.append(f"genus {g} monomial with {len(vars)} factors")
        if sum(k1 for k1, _ in vars) - m != 2 * g:
            problems.append(f"genus {g} monomial with x-derivative count {sum(k1 for k1, _ in vars)}")
    if not p.is_homogeneous() or (p and p.degree() != (0, 0)):
        problems.append("not homogeneous of degree (0,0)")
    if not p.is_real():
        problems.append("non-real coefficient")
    return problems


def commutator_defect(m: int, n: int, eps_max: int = 8) -> DiffPoly2:
    """``D_m(dx P_n) - D_n(dx P_m)`` with all terms of eps order ``<= eps_max``."""
    fm = _flow_at_least(m, eps_max).truncate(eps_max=eps_max).dx()
    fn = _flow_at_least(n, eps_max).truncate(eps_max=eps_max).dx()
    return (fn.evolve(fm, eps_max=eps_max, mu_max=eps_max)
            - fm.evolve(fn, eps_max=eps_max, mu_max=eps_max))


def _flow_at_least(n: int, eps_max: int) -> DiffPoly2:
    base = Truncation.for_flow(n)
    return flow(n, base.with_eps_max(max(base.eps_max, eps_max)))


def check_commutativity(m: int, n: int, eps_max: int = 8) -> bool:
    return not commutator_defect(m, n, eps_max)


class FlowTable:
    """Flows ``P_1..P_N`` together with the truncation that produced them."""

    def __init__(self, flows: Dict[int, DiffPoly2], truncs: Dict[int, Truncation]):
        self.flows = dict(flows)
        self.truncs = dict(truncs)

    @classmethod
    def build(cls, ns: Iterable[int], eps_max: Optional[int] = None) -> "FlowTable":
        flows, truncs = {}, {}
        for n in ns:
            t = Truncation.for_flow(n)
            if eps_max is not None and eps_max > t.eps_max:
                t = t.with_eps_max(eps_max)
            flows[n] = flow(n, t)
            truncs[n] = t
        return cls(flows, truncs)

    def __getitem__(self, n: int) -> DiffPoly2:
        return self.flows[n]

    def __contains__(self, n):
        return n in self.flows

    def to_json(self) -> list:
        return [{"n": n, "trunc": self.truncs[n].to_json(), "P": self.flows[n].to_json()}
                for n in sorted(self.flows)]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=False)

    def to_tsv(self) -> str:
        lines = ["n\teps\tmu\tre\tim\tvars"]
        for n in sorted(self.flows):
            for (e, m, vars), c in self.flows[n].items():
                j = c.to_json()
                v = " ".join(f"u{k1}{k2}" for k1, k2 in vars)
                lines.append(f"{n}\t{e}\t{m}\t{j['re']}\t{j['im']}\t{v}")
        return "\n".join(lines) + "\n"
