"""Reconstruct ``<prod tau^{a_i}_{d_i}>_{g,j} = int 2^-j P_g^j(A) prod psi_i^{d_i}`` as unknowns.

The constraints are the dimension count, the string and dilaton equations,
and the ncKdV flows for ``u = T(a, eps mu dx) w`` with
``w^a = d^2 F / dt^0_0 dt^{-a}_0``.  Taking ``d_X d_{t_m}`` of
``du/dt_m = dx P_m(u)`` at ``t = 0`` and matching powers of ``eps`` and ``mu``
gives polynomial identities among the correlators.  Everything is exact.

Correlators outside the table (more points than ``n_max`` or a mode beyond
``mode_bound``) are rewritten with string/dilaton when possible; a component
of a flow equation that still needs an unknown outside the table is dropped
and counted.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .hierarchy import flow
from .linalg import Inconsistent, SparseRREF
from .predictors import Q
from .psido import Truncation
from .scalar import Scalar, frac_str, i_power

__all__ = [
    "IntersectionKey", "IntersectionTable", "Equation", "ConsistencyReport", "SolverConfig",
    "MissingLowerLevel", "InconsistentSystem", "FitValidationFailed", "FittedPolynomial",
    "make_key", "table_keys", "seed", "string_relations", "dilaton_relations",
    "flow_relations", "solve", "polynomial_fit",
]

Pair = Tuple[int, int]  # (mode a, descendant d)


class MissingLowerLevel(LookupError):
    pass


class InconsistentSystem(ArithmeticError):
    def __init__(self, message: str, equations):
        super().__init__(message)
        self.equations = equations


class FitValidationFailed(ArithmeticError):
    pass


class IntersectionKey(NamedTuple):
    g: int
    j: int
    pairs: Tuple[Pair, ...]

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def A(self) -> Tuple[int, ...]:
        return tuple(a for a, _ in self.pairs)

    @property
    def D(self) -> Tuple[int, ...]:
        return tuple(d for _, d in self.pairs)

    @property
    def level(self) -> Tuple[int, int]:
        return (3 * self.g + self.n, self.g)

    def __str__(self):
        inner = " ".join(f"t^{a}_{d}" for a, d in self.pairs)
        return f"<{inner}>_(g={self.g},j={self.j})"


def admissible(g: int, j: int, pairs: Sequence[Pair]) -> bool:
    n = len(pairs)
    return (g >= 0 and 0 <= j <= g and 2 * g - 2 + n > 0 and sum(a for a, _ in pairs) == 0
            and all(d >= 0 for _, d in pairs) and sum(d for _, d in pairs) == 3 * g - 3 + n - j)


def make_key(g: int, j: int, A: Sequence[int], D: Sequence[int]) -> IntersectionKey:
    """Canonical key for positional data; raises ``ValueError`` if not admissible."""
    if len(A) != len(D):
        raise ValueError("A and D differ in length")
    pairs = tuple(sorted(zip((int(a) for a in A), (int(d) for d in D))))
    if not admissible(g, j, pairs):
        raise ValueError(f"no such intersection number: g={g}, j={j}, A={tuple(A)}, D={tuple(D)}")
    return IntersectionKey(g, j, pairs)


def table_keys(g_max: int, n_max: int, mode_bound: int) -> List[IntersectionKey]:
    """All admissible keys with ``g <= g_max``, ``n <= n_max``, ``|a_i| <= mode_bound``."""
    keys = []
    modes = range(-mode_bound, mode_bound + 1)
    for g in range(g_max + 1):
        for n in range(1, n_max + 1):
            if 2 * g - 2 + n <= 0:
                continue
            for j in range(g + 1):
                dim = 3 * g - 3 + n - j
                if dim < 0:
                    continue
                elems = [(a, d) for a in modes for d in range(dim + 1)]
                for pairs in combinations_with_replacement(elems, n):
                    if admissible(g, j, pairs):
                        keys.append(IntersectionKey(g, j, tuple(pairs)))
    return sorted(keys)


# -- table ------------------------------------------------------------------


class IntersectionTable:
    PROVENANCE = ("seed", "solved", "checked")

    def __init__(self):
        self.values: Dict[IntersectionKey, Fraction] = {}
        self.provenance: Dict[IntersectionKey, str] = {}

    def set(self, key: IntersectionKey, value, provenance: str = "solved"):
        if provenance not in self.PROVENANCE:
            raise ValueError(f"unknown provenance {provenance!r}")
        value = Fraction(value)
        old = self.values.get(key)
        if old is not None and old != value:
            raise InconsistentSystem(f"{key}: {old} vs {value}", [key])
        self.values[key] = value
        self.provenance[key] = provenance

    def mark_checked(self, key: IntersectionKey):
        if key in self.values:
            self.provenance[key] = "checked"

    def __contains__(self, key):
        return key in self.values

    def __getitem__(self, key: IntersectionKey) -> Fraction:
        return self.values[key]

    def __len__(self):
        return len(self.values)

    def get(self, key, default=None):
        return self.values.get(key, default)

    def value(self, g: int, j: int, A: Sequence[int], D: Sequence[int]) -> Fraction:
        """Positional lookup; zero off the dimension constraint, ``KeyError`` if unknown."""
        pairs = tuple(sorted(zip(A, D)))
        if not admissible(g, j, pairs):
            return Fraction(0)
        key = IntersectionKey(g, j, pairs)
        if key not in self.values:
            raise KeyError(str(key))
        return self.values[key]

    def items(self):
        return sorted(self.values.items())

    def to_json(self) -> list:
        return [{"g": k.g, "j": k.j, "A": list(k.A), "D": list(k.D), "value": frac_str(v),
                 "provenance": self.provenance[k]} for k, v in self.items()]

    def dumps(self) -> str:
        rows = self.to_json()
        return "[\n" + ",\n".join(json.dumps(r) for r in rows) + "\n]" if rows else "[]"

    @classmethod
    def from_json(cls, rows) -> "IntersectionTable":
        t = cls()
        for r in rows:
            t.set(make_key(r["g"], r["j"], r["A"], r["D"]), Fraction(r["value"]), r["provenance"])
        return t


# -- equations ----------------------------------------------------------------

KeyMono = Tuple[IntersectionKey, ...]  # sorted; () is the constant


@dataclass
class Equation:
    """``sum_mono coeff * prod(keys) = 0`` with rational coefficients."""

    terms: Dict[KeyMono, Fraction]
    source: str

    def keys(self) -> set:
        return {k for mono in self.terms for k in mono}

    def level(self) -> Tuple[int, int]:
        return max((k.level for k in self.keys()), default=(0, 0))

    def substitute(self, known) -> "Equation":
        out: Dict[KeyMono, Fraction] = defaultdict(Fraction)
        for mono, c in self.terms.items():
            rest = []
            for k in mono:
                v = known(k)
                if v is None:
                    rest.append(k)
                else:
                    c *= v
                    if not c:
                        break
            if c:
                out[tuple(rest)] += c
        return Equation({m: c for m, c in out.items() if c}, self.source)

    def is_linear(self) -> bool:
        return all(len(m) <= 1 for m in self.terms)

    def as_row(self):
        row = {m[0]: c for m, c in self.terms.items() if m}
        return row, -self.terms.get((), Fraction(0))

    def __str__(self):
        parts = []
        for mono, c in sorted(self.terms.items()):
            parts.append(f"{c}" + "".join(f"*{k}" for k in mono))
        return f"[{self.source}] " + (" + ".join(parts) or "0") + " = 0"


def seed(table: IntersectionTable, mode_bound: int) -> IntersectionTable:
    """Genus-0 three-point numbers: ``int_{M_{0,3}} 1 = 1`` for every admissible ``A``."""
    for key in table_keys(0, 3, mode_bound):
        if key.n == 3:
            table.set(key, 1, "seed")
    return table


def _lower(pairs: Tuple[Pair, ...], drop: Pair) -> Tuple[Tuple[Pair, ...], List[Tuple[Pair, ...]]]:
    """Remove one ``drop`` and list the ways of lowering one remaining descendant."""
    rest = list(pairs)
    rest.remove(drop)
    lowered = []
    for idx, (a, d) in enumerate(rest):
        if d >= 1:
            new = rest[:idx] + [(a, d - 1)] + rest[idx + 1:]
            lowered.append(tuple(sorted(new)))
    return tuple(rest), lowered


def string_relations(keys: Iterable[IntersectionKey]) -> List[Equation]:
    """``<tau^0_0 X>_g = sum <X with one d lowered>_g`` when ``(g, |X|)`` is stable."""
    eqs = []
    for key in keys:
        if (0, 0) not in key.pairs or 2 * key.g - 2 + key.n - 1 <= 0:
            continue
        _, lowered = _lower(key.pairs, (0, 0))
        terms: Dict[KeyMono, Fraction] = defaultdict(Fraction)
        terms[(key,)] += 1
        for pairs in lowered:
            if admissible(key.g, key.j, pairs):
                terms[(IntersectionKey(key.g, key.j, pairs),)] -= 1
        eqs.append(Equation({m: c for m, c in terms.items() if c}, "string"))
    return eqs


def dilaton_relations(keys: Iterable[IntersectionKey]) -> List[Equation]:
    """``<tau^0_1 X>_g = (2g-2+|X|) <X>_g``, and ``<tau^0_1>_{1,0} = 1/24``."""
    eqs = []
    for key in keys:
        if (0, 1) not in key.pairs:
            continue
        rest, _ = _lower(key.pairs, (0, 1))
        chi = 2 * key.g - 2 + len(rest)
        if chi <= 0:
            if key.g == 1 and key.j == 0 and not rest:
                eqs.append(Equation({(key,): Fraction(1), (): Fraction(-1, 24)}, "dilaton"))
            continue
        terms = {(key,): Fraction(1)}
        if admissible(key.g, key.j, rest):
            terms[(IntersectionKey(key.g, key.j, rest),)] = Fraction(-chi)
        eqs.append(Equation(terms, "dilaton"))
    return eqs


class _Out:
    """Marker for a correlator the table cannot express."""


OUT = _Out()


class _Context:
    """Correlator expansion and the flow equations for fixed bounds."""

    def __init__(self, g_max: int, n_max: int, mode_bound: int):
        self.g_max = g_max
        self.n_max = n_max
        self.mode_bound = mode_bound
        self.eps_cap = 2 * g_max
        self._expand_memo: Dict = {}
        self._factor_memo: Dict = {}

    def in_table(self, g: int, pairs) -> bool:
        return (g <= self.g_max and len(pairs) <= self.n_max
                and all(abs(a) <= self.mode_bound for a, _ in pairs))

    def expand(self, g: int, j: int, pairs: Tuple[Pair, ...]):
        """Linear form ``{key or (): coeff}`` for a correlator, or ``OUT``."""
        pairs = tuple(sorted(pairs))
        memo_key = (g, j, pairs)
        if memo_key in self._expand_memo:
            return self._expand_memo[memo_key]
        if not admissible(g, j, pairs):
            res = {}
        elif g == 0 and len(pairs) == 3:
            res = {(): Fraction(1)}
        elif self.in_table(g, pairs):
            res = {IntersectionKey(g, j, pairs): Fraction(1)}
        elif (0, 0) in pairs and 2 * g - 2 + len(pairs) - 1 > 0:
            _, lowered = _lower(pairs, (0, 0))
            res = {}
            for low in lowered:
                sub = self.expand(g, j, low)
                if sub is OUT:
                    res = OUT
                    break
                for k, c in sub.items():
                    res[k] = res.get(k, 0) + c
            if res is not OUT:
                res = {k: c for k, c in res.items() if c}
        elif (0, 1) in pairs and 2 * g - 2 + len(pairs) - 1 > 0:
            rest, _ = _lower(pairs, (0, 1))
            sub = self.expand(g, j, rest)
            chi = 2 * g - 2 + len(rest)
            res = OUT if sub is OUT else {k: c * chi for k, c in sub.items()}
        else:
            res = OUT
        self._expand_memo[memo_key] = res
        return res

    def factor(self, k1: int, k2: int, S: Tuple[Pair, ...]):
        """``d_S`` of ``(ib)^{k2} dx^{k1} u^b`` at ``t = 0``, ``b = sum of modes in S``.

        Returned as ``(series, poisoned)``: ``series[(e, m)]`` is a linear form
        in keys, ``poisoned`` the orders touching a correlator out of reach.
        """
        S = tuple(sorted(S))
        memo_key = (k1, k2, S)
        if memo_key in self._factor_memo:
            return self._factor_memo[memo_key]
        b = sum(a for a, _ in S)
        series: Dict[Tuple[int, int], Dict] = {}
        poisoned = set()
        pref = i_power(k2) * Fraction(b) ** k2 if k2 else Scalar(1)
        if pref:
            sd = sum(d for _, d in S)
            for h in range(self.eps_cap // 2 + 1):
                q = Q(h)(b)
                if not q:
                    continue
                n = k1 + 2 * h + 2 + len(S)
                for g in range(self.g_max - h + 1):
                    j = 3 * g - 3 + n - sd
                    if not 0 <= j <= g:
                        continue
                    pairs = ((0, 0),) * (k1 + 2 * h + 1) + ((-b, 0),) + S
                    form = self.expand(g, j, pairs)
                    order = (2 * h + 2 * g, 2 * h + 2 * j)
                    if form is OUT:
                        poisoned.add(order)
                        continue
                    if not form:
                        continue
                    slot = series.setdefault(order, {})
                    for k, c in form.items():
                        slot[k] = slot.get(k, Scalar(0)) + pref * (c * q)
            series = {o: {k: c for k, c in f.items() if c} for o, f in series.items()}
            series = {o: f for o, f in series.items() if f}
        res = (series, frozenset(poisoned))
        self._factor_memo[memo_key] = res
        return res

    def _mul(self, A, B):
        """Product of two (series of key polynomials, poisoned) pairs, cut at eps_cap."""
        sa, pa = A
        sb, pb = B
        out: Dict[Tuple[int, int], Dict[KeyMono, Scalar]] = {}
        for (e1, m1), f1 in sa.items():
            for (e2, m2), f2 in sb.items():
                e = e1 + e2
                if e > self.eps_cap:
                    continue
                slot = out.setdefault((e, m1 + m2), {})
                for k1_, c1 in f1.items():
                    for k2_, c2 in f2.items():
                        mono = tuple(sorted(k1_ + k2_))
                        slot[mono] = slot.get(mono, Scalar(0)) + c1 * c2
        poisoned = set()
        for (e1, m1) in pa:
            for (e2, m2) in set(sb) | set(pb):
                if e1 + e2 <= self.eps_cap:
                    poisoned.add((e1 + e2, m1 + m2))
        for (e2, m2) in pb:
            for (e1, m1) in set(sa):
                if e1 + e2 <= self.eps_cap:
                    poisoned.add((e1 + e2, m1 + m2))
        return out, frozenset(poisoned)

    @staticmethod
    def _poly_series(series):
        # linear forms keyed by key-or-() -> polynomial monomials
        return {o: {(() if k == () else (k,)): c for k, c in f.items()} for o, f in series.items()}

    def _distribute(self, vars: Tuple[Tuple[int, int], ...], ins: Tuple[Pair, ...], mask: int, memo):
        """Sum over ways of handing the insertions in ``mask`` to the factors ``vars``."""
        key = (vars, mask)
        if key in memo:
            return memo[key]
        if not vars:
            res = ({(0, 0): {(): Scalar(1)}}, frozenset()) if mask == 0 else ({}, frozenset())
            memo[key] = res
            return res
        k1, k2 = vars[0]
        series: Dict[Tuple[int, int], Dict[KeyMono, Scalar]] = {}
        poisoned = set()
        sub = mask
        while True:
            # sub runs over all subsets of mask, including 0
            S = tuple(ins[i] for i in range(len(ins)) if sub >> i & 1)
            head = self.factor(k1, k2, S)
            if head[0] or head[1]:
                tail = self._distribute(vars[1:], ins, mask & ~sub, memo)
                if tail[0] or tail[1]:
                    prod, pois = self._mul((self._poly_series(head[0]), head[1]), tail)
                    for order, poly in prod.items():
                        slot = series.setdefault(order, {})
                        for mono, v in poly.items():
                            slot[mono] = slot.get(mono, Scalar(0)) + v
                    poisoned |= pois
            if sub == 0:
                break
            sub = (sub - 1) & mask
        res = ({o: f for o, f in series.items() if f}, frozenset(poisoned))
        memo[key] = res
        return res

    def flow_equations(self, m: int, P, X: Tuple[Pair, ...]) -> Tuple[List[Equation], int]:
        """Equations from ``d_X`` of the flow-``m`` equation; also returns #dropped components."""
        lhs_series, lhs_poison = self.factor(0, 0, X + ((0, m),))
        lhs = self._poly_series(lhs_series)
        Xp = X + ((0, 0),)
        full = (1 << len(Xp)) - 1
        # group the flow by variables: the insertions only see the factor list
        grouped: Dict[Tuple[Tuple[int, int], ...], Dict[Tuple[int, int], Dict[KeyMono, Scalar]]] = defaultdict(dict)
        for (e, mu, vars), c in P.items():
            # factors other than u_{1,0} vanish unless they receive an insertion
            if sum(1 for v in vars if v != (1, 0)) > len(Xp):
                continue
            grouped[vars][(e, mu)] = {(): c}
        memo: Dict = {}
        rhs: Dict[Tuple[int, int], Dict[KeyMono, Scalar]] = {}
        poisoned = set(lhs_poison)
        for vars, coeffs in grouped.items():
            dist = self._distribute(vars, Xp, full, memo)
            if not dist[0] and not dist[1]:
                continue
            prod, pois = self._mul((coeffs, frozenset()), dist)
            for order, poly in prod.items():
                slot = rhs.setdefault(order, {})
                for mono, v in poly.items():
                    slot[mono] = slot.get(mono, Scalar(0)) + v
            poisoned |= pois
        eqs = []
        dropped = 0
        for order in sorted(set(lhs) | set(rhs) | poisoned):
            if order[0] > self.eps_cap:
                continue
            if order in poisoned:
                dropped += 1
                continue
            terms: Dict[KeyMono, Scalar] = defaultdict(lambda: Scalar(0))
            for mono, v in lhs.get(order, {}).items():
                terms[mono] = terms[mono] + v
            for mono, v in rhs.get(order, {}).items():
                terms[mono] = terms[mono] - v
            re = {mono: v.re for mono, v in terms.items() if v.re}
            im = {mono: v.im for mono, v in terms.items() if v.im}
            tag = f"flow {m} X={list(X)} eps^{order[0]} mu^{order[1]}"
            for part, name in ((re, "re"), (im, "im")):
                if part:
                    eqs.append(Equation({mono: Fraction(v) for mono, v in part.items()}, f"{tag} {name}"))
        return eqs, dropped


def insertion_sets(g_max: int, n_max: int, mode_bound: int) -> List[Tuple[Pair, ...]]:
    """The multisets ``X`` of insertions (``|X| <= n_max - 1``) used in flow equations."""
    out = []
    modes = range(-mode_bound, mode_bound + 1)
    for size in range(n_max):
        # the left side <t^0_0 t^{-a}_0 X t^0_m> needs sum(d_X) + m <= 3 g_max + |X|
        dmax = 3 * g_max + size - 1
        elems = [(a, d) for a in modes for d in range(dmax + 1)]
        for X in combinations_with_replacement(elems, size):
            if abs(sum(a for a, _ in X)) > mode_bound or sum(d for _, d in X) > dmax:
                continue
            out.append(tuple(X))
    return out


def flow_relations(m: int, g_max: int, n_max: int, mode_bound: int, P=None,
                   context: Optional[_Context] = None) -> Tuple[List[Equation], int]:
    """All flow-``m`` equations within the bounds, with the number of dropped components."""
    ctx = context or _Context(g_max, n_max, mode_bound)
    if P is None:
        P = _solver_flow(m, g_max)
    eqs, dropped = [], 0
    for X in insertion_sets(g_max, n_max, mode_bound):
        e, d = ctx.flow_equations(m, P, X)
        eqs.extend(e)
        dropped += d
    return eqs, dropped


def _solver_flow(m: int, g_max: int):
    base = Truncation.for_flow(m)
    trunc = base.with_eps_max(max(base.eps_max, 2 * g_max))
    return flow(m, trunc).truncate(eps_max=2 * g_max)


# -- solve ------------------------------------------------------------------


@dataclass
class LevelReport:
    level: Tuple[int, int]
    unknowns: int
    rank: int
    redundant_consistent: int
    inconsistent: int
    undetermined: int
    equations: int

    def to_json(self):
        return {"level": {"3g+n": self.level[0], "g": self.level[1]}, "unknowns": self.unknowns,
                "rank": self.rank, "redundant_consistent": self.redundant_consistent,
                "inconsistent": self.inconsistent, "undetermined": self.undetermined,
                "equations": self.equations}


@dataclass
class ConsistencyReport:
    levels: List[LevelReport] = field(default_factory=list)
    undetermined: List[IntersectionKey] = field(default_factory=list)
    dropped_components: int = 0
    unresolved_nonlinear: int = 0
    equations_total: int = 0
    config: dict = field(default_factory=dict)

    @property
    def inconsistent(self) -> int:
        return sum(l.inconsistent for l in self.levels)

    def to_json(self):
        return {"config": self.config,
                "levels": [l.to_json() for l in self.levels],
                "inconsistent": self.inconsistent,
                "undetermined": [{"g": k.g, "j": k.j, "A": list(k.A), "D": list(k.D)}
                                 for k in self.undetermined],
                "dropped_components": self.dropped_components,
                "unresolved_nonlinear": self.unresolved_nonlinear,
                "equations_total": self.equations_total}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


@dataclass(frozen=True)
class SolverConfig:
    g_max: int
    n_max: int
    mode_bound: int
    m_max: int
    extra_points: int = 0

    def __post_init__(self):
        if self.g_max < 0 or self.n_max < 1 or self.mode_bound < 0 or self.m_max < 1 or self.extra_points < 0:
            raise ValueError("solver bounds must be positive (g_max, mode_bound, extra_points may be 0)")


def solve(g_max: int, n_max: int, mode_bound: int, m_max: int,
          extra_points: int = 0) -> Tuple[IntersectionTable, ConsistencyReport]:
    """Determine the table level by level (increasing ``3g+n``, ties by ``g``).

    With ``extra_points > 0`` the system is built with correlators of up to
    ``n_max + extra_points`` points as auxiliary unknowns, which pins entries
    at the ``n_max`` boundary; only entries with ``n <= n_max`` are returned.
    """
    cfg = SolverConfig(g_max, n_max, mode_bound, m_max, extra_points)
    n_int = n_max + extra_points
    keys = table_keys(g_max, n_int, mode_bound)
    table = seed(IntersectionTable(), mode_bound)
    report = ConsistencyReport(config={"g_max": g_max, "n_max": n_max, "mode_bound": mode_bound,
                                       "m_max": m_max, "extra_points": extra_points})

    ctx = _Context(g_max, n_int, mode_bound)
    equations: List[Equation] = []
    equations += string_relations(keys)
    equations += dilaton_relations(keys)
    for m in range(1, cfg.m_max + 1):
        eqs, dropped = flow_relations(m, g_max, n_int, mode_bound, context=ctx)
        equations += eqs
        report.dropped_components += dropped
    report.equations_total = len(equations)

    system = SparseRREF()

    def known(k):
        if k in table:
            return table[k]
        return system.value(k)

    by_level: Dict[Tuple[int, int], List[Equation]] = defaultdict(list)
    for eq in equations:
        by_level[eq.level()].append(eq)
    key_levels: Dict[Tuple[int, int], List[IntersectionKey]] = defaultdict(list)
    for k in keys:
        key_levels[k.level].append(k)

    pending: List[Equation] = []
    for level in sorted(set(by_level) | set(key_levels)):
        rank0 = system.rank
        stats = Counter()
        queue = pending + by_level.get(level, [])
        pending = []
        progress = True
        while progress:
            progress = False
            deferred = []
            for eq in queue:
                sub = eq.substitute(known)
                if not sub.is_linear():
                    deferred.append(eq)
                    continue
                row, rhs = sub.as_row()
                try:
                    outcome = system.add(row, rhs, eq.source)
                except Inconsistent as exc:
                    stats["inconsistent"] += 1
                    report.levels.append(_level_report(level, key_levels, system, table, rank0, stats))
                    raise InconsistentSystem(f"inconsistent equation at level {level}: {sub} "
                                             f"(residual {exc.residual})", [eq, sub]) from exc
                stats[outcome] += 1
                stats["equations"] += 1
                if outcome == "new":
                    progress = True
            queue = deferred
        pending = queue
        report.levels.append(_level_report(level, key_levels, system, table, rank0, stats))

    # nonlinear leftovers: check those that became constant, count the rest
    for eq in pending:
        sub = eq.substitute(known)
        if sub.is_linear():
            row, rhs = sub.as_row()
            try:
                system.add(row, rhs, eq.source)
            except Inconsistent as exc:
                raise InconsistentSystem(f"inconsistent equation: {sub}", [eq, sub]) from exc
        else:
            report.unresolved_nonlinear += 1

    out = IntersectionTable()
    for k, v in table.items():
        out.set(k, v, table.provenance[k])
    for k in keys:
        if k.n > n_max or k in table:
            continue
        v = system.value(k)
        if v is None:
            report.undetermined.append(k)
        else:
            out.set(k, v, "solved")
    return out, report


def _level_report(level, key_levels, system, table, rank0, stats) -> LevelReport:
    ks = key_levels.get(level, [])
    undetermined = sum(1 for k in ks if k not in table and system.value(k) is None)
    return LevelReport(level=level, unknowns=len(ks), rank=system.rank - rank0,
                       redundant_consistent=stats["redundant"], inconsistent=stats["inconsistent"],
                       undetermined=undetermined, equations=stats["equations"])


# -- polynomial dependence on the modes --------------------------------------


class FittedPolynomial:
    """Exact polynomial in the free modes ``a_1..a_{n-1}`` (``a_n = -sum``)."""

    def __init__(self, coeffs: Dict[Tuple[int, ...], Fraction], nvars: int):
        self.coeffs = {e: Fraction(c) for e, c in coeffs.items() if c}
        self.nvars = nvars

    def __call__(self, *modes) -> Fraction:
        total = Fraction(0)
        for exps, c in self.coeffs.items():
            term = c
            for a, e in zip(modes, exps):
                term *= Fraction(a) ** e
            total += term
        return total

    def is_even(self) -> bool:
        return all(sum(e) % 2 == 0 for e in self.coeffs)

    def odd_coefficients(self) -> Dict[Tuple[int, ...], Fraction]:
        return {e: c for e, c in self.coeffs.items() if sum(e) % 2}

    def degree(self) -> int:
        return max((sum(e) for e in self.coeffs), default=0)

    def __eq__(self, other):
        if isinstance(other, FittedPolynomial):
            return self.nvars == other.nvars and self.coeffs == other.coeffs
        return NotImplemented

    def __repr__(self):
        if not self.coeffs:
            return "0"
        names = [f"a{i + 1}" for i in range(self.nvars)]
        parts = []
        for exps, c in sorted(self.coeffs.items()):
            mono = "*".join(f"{v}^{e}" if e > 1 else v for v, e in zip(names, exps) if e)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)


def _exponents(nvars: int, degree: int):
    for total in range(degree + 1):
        for combo in combinations_with_replacement(range(nvars), total):
            e = [0] * nvars
            for v in combo:
                e[v] += 1
            yield tuple(e)


def polynomial_fit(table: IntersectionTable, g: int, j: int, D: Sequence[int],
                   samples: Optional[Iterable[Sequence[int]]] = None,
                   validation: int = 1) -> FittedPolynomial:
    """Fit the entries ``(g, j, A, D)`` by a polynomial of degree ``<= 2j`` in the free modes.

    ``samples`` are tuples of the first ``n-1`` modes (default: every tuple the
    table has).  All samples are used in one exact least-degree solve; at
    least ``validation`` more samples than unknown coefficients are required
    and must be matched exactly, otherwise :class:`FitValidationFailed`.
    """
    n = len(D)
    nvars = n - 1
    if samples is None:
        found = set()
        for key in table.values:
            if key.g != g or key.j != j or key.n != n:
                continue
            for perm in _orderings(key.pairs):
                if tuple(d for _, d in perm) == tuple(D):
                    found.add(tuple(a for a, _ in perm[:-1]))
        samples = sorted(found)
    else:
        samples = [tuple(s) for s in samples]
    exps = list(_exponents(nvars, 2 * j))
    points = []
    for s in samples:
        A = tuple(s) + (-sum(s),)
        try:
            points.append((s, table.value(g, j, A, D)))
        except KeyError as exc:
            raise FitValidationFailed(f"no table value at A={A}") from exc
    if len(points) < len(exps) + validation:
        raise FitValidationFailed(f"{len(points)} samples for {len(exps)} coefficients")
    system = SparseRREF()
    for s, v in points:
        row = {}
        for e in exps:
            t = Fraction(1)
            for a, k in zip(s, e):
                t *= Fraction(a) ** k
            if t:
                row[e] = t
        try:
            system.add(row, v)
        except Inconsistent as exc:
            raise FitValidationFailed(f"samples are not a polynomial of degree <= {2 * j}: "
                                      f"residual {exc.residual}") from exc
    if system.rank < len(exps) or len(system.determined()) < len(exps):
        raise FitValidationFailed("samples do not pin the polynomial")
    if len(points) - system.rank < validation:
        raise FitValidationFailed("no sample left over for validation")
    return FittedPolynomial(system.determined(), nvars)


def _orderings(pairs):
    from itertools import permutations
    return set(permutations(pairs))
