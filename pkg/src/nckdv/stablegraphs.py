"""Stable graphs of genus ``g`` with ``n`` legs, automorphisms and weightings mod ``r``.

A graph is stored as vertex genera, a sorted edge list ``(v, w)`` with
``v <= w`` (``v == w`` is a self-loop) and the vertex of each leg ``1..n``.
Graphs are compared through a canonical form, the minimum over vertex
relabellings of the serialized data; legs are never relabelled.
"""

from __future__ import annotations

import json
from collections import Counter
from itertools import combinations_with_replacement, permutations, product as cartesian
from math import factorial
from typing import Dict, List, Sequence, Tuple

__all__ = ["StableGraph", "enumerate_graphs", "aut_order", "aut_order_bruteforce",
           "weighting_count", "dumps"]


class StableGraph:
    __slots__ = ("genera", "edges", "legs")

    def __init__(self, genera: Sequence[int], edges: Sequence[Tuple[int, int]], legs: Sequence[int]):
        self.genera = tuple(int(g) for g in genera)
        self.edges = tuple(sorted((min(v, w), max(v, w)) for v, w in edges))
        self.legs = tuple(int(v) for v in legs)
        V = len(self.genera)
        if any(not 0 <= v < V for e in self.edges for v in e) or any(not 0 <= v < V for v in self.legs):
            raise ValueError("edge or leg refers to a missing vertex")

    @property
    def n_vertices(self) -> int:
        return len(self.genera)

    @property
    def h1(self) -> int:
        return len(self.edges) - self.n_vertices + 1

    @property
    def genus(self) -> int:
        return sum(self.genera) + self.h1

    @property
    def n_legs(self) -> int:
        return len(self.legs)

    def valence(self, v: int) -> int:
        out = sum(1 for w in self.legs if w == v)
        for a, b in self.edges:
            out += (a == v) + (b == v)
        return out

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for a, b in self.edges:
                for x, y in ((a, b), (b, a)):
                    if x == v and y not in seen:
                        seen.add(y)
                        stack.append(y)
        return len(seen) == self.n_vertices

    def is_stable(self) -> bool:
        return all(2 * g - 2 + self.valence(v) > 0 for v, g in enumerate(self.genera))

    def relabel(self, perm: Sequence[int]) -> "StableGraph":
        """Vertex ``v`` becomes ``perm[v]``."""
        genera = [0] * self.n_vertices
        for v, g in enumerate(self.genera):
            genera[perm[v]] = g
        return StableGraph(genera, [(perm[a], perm[b]) for a, b in self.edges],
                           [perm[v] for v in self.legs])

    def _key(self):
        return (self.genera, self.edges, self.legs)

    def canonical(self) -> "StableGraph":
        best = None
        for perm in permutations(range(self.n_vertices)):
            cand = self.relabel(perm)
            if best is None or cand._key() < best._key():
                best = cand
        return best

    def multiplicity(self) -> Counter:
        return Counter(self.edges)

    def half_edges(self) -> Tuple[List[int], Dict[int, int], List[int]]:
        """``(vertex of each half-edge, involution, leg half-edges)``; legs come first."""
        vertex = list(self.legs)
        inv: Dict[int, int] = {h: h for h in range(len(self.legs))}
        for a, b in self.edges:
            h = len(vertex)
            vertex += [a, b]
            inv[h], inv[h + 1] = h + 1, h
        return vertex, inv, list(range(len(self.legs)))

    def __eq__(self, other):
        return isinstance(other, StableGraph) and self.canonical()._key() == other.canonical()._key()

    def __hash__(self):
        return hash(self.canonical()._key())

    def __repr__(self):
        return f"StableGraph(genera={self.genera}, edges={self.edges}, legs={self.legs})"

    def to_json(self) -> dict:
        return {"genera": list(self.genera), "edges": [list(e) for e in self.edges],
                "legs": list(self.legs), "h1": self.h1, "aut": aut_order(self)}


def _genus_labels(total: int, V: int):
    for labels in cartesian(range(total + 1), repeat=V):
        if sum(labels) == total and list(labels) == sorted(labels, reverse=True):
            yield labels


def enumerate_graphs(g: int, n: int) -> List[StableGraph]:
    """All stable graphs of genus ``g`` with ``n`` legs, one per isomorphism class."""
    if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
        raise ValueError("need 2g - 2 + n > 0")
    found: Dict[tuple, StableGraph] = {}
    for V in range(1, 2 * g - 2 + n + 1):
        pairs = [(v, w) for v in range(V) for w in range(v, V)]
        for h1 in range(g + 1):
            E = h1 + V - 1
            for labels in _genus_labels(g - h1, V):
                for edges in combinations_with_replacement(pairs, E):
                    # cheap prune: every vertex must carry enough half-edges
                    deg = [0] * V
                    for a, b in edges:
                        deg[a] += 1
                        deg[b] += 1
                    need = sum(max(0, 3 - 2 * labels[v] - deg[v]) for v in range(V))
                    if need > n:
                        continue
                    for legs in cartesian(range(V), repeat=n):
                        gr = StableGraph(labels, edges, legs)
                        if not (gr.is_stable() and gr.is_connected()):
                            continue
                        c = gr.canonical()
                        found.setdefault(c._key(), c)
    return [found[k] for k in sorted(found)]


def aut_order(gr: StableGraph) -> int:
    """``|Aut|``: vertex maps fixing legs and genera, times edge and loop symmetries."""
    mult = gr.multiplicity()
    count = 0
    for perm in permutations(range(gr.n_vertices)):
        if any(gr.genera[perm[v]] != gr.genera[v] for v in range(gr.n_vertices)):
            continue
        if any(perm[v] != v for v in gr.legs):
            continue
        moved = Counter((min(perm[a], perm[b]), max(perm[a], perm[b])) for a, b in gr.edges)
        if moved == mult:
            count += 1
    for (a, b), k in mult.items():
        count *= factorial(k) * (2 ** k if a == b else 1)
    return count


def aut_order_bruteforce(gr: StableGraph) -> int:
    """Count half-edge permutations fixing legs that commute with the involution
    and induce a genus-preserving vertex bijection.

    Search by backtracking over edges: each edge ``(h, h')`` goes to an unused
    edge in one of its two orientations.
    """
    vertex, _, legs = gr.half_edges()
    first = len(legs)
    pairs = [(h, h + 1) for h in range(first, len(vertex), 2)]
    vmap: Dict[int, int] = {v: v for v in gr.legs}
    used = [False] * len(pairs)

    def assign(v: int, w: int, added: list) -> bool:
        if gr.genera[v] != gr.genera[w]:
            return False
        if v in vmap:
            return vmap[v] == w
        if w in vmap.values():
            return False
        vmap[v] = w
        added.append(v)
        return True

    def extend(i: int) -> int:
        if i == len(pairs):
            return 1
        h, hh = pairs[i]
        total = 0
        for k, (t, tt) in enumerate(pairs):
            if used[k]:
                continue
            for x, y in ((t, tt), (tt, t)):
                added: list = []
                if assign(vertex[h], vertex[x], added) and assign(vertex[hh], vertex[y], added):
                    used[k] = True
                    total += extend(i + 1)
                    used[k] = False
                for v in added:
                    del vmap[v]
        return total

    return extend(0)


def weighting_count(gr: StableGraph, A: Sequence[int], r: int) -> int:
    """Number of weightings mod ``r`` with leg values ``A``, by brute force."""
    if len(A) != gr.n_legs:
        raise ValueError("one mode per leg")
    if sum(A) != 0:
        raise ValueError("modes must sum to zero")
    if r < 1:
        raise ValueError("r must be >= 1")
    count = 0
    for ws in cartesian(range(r), repeat=len(gr.edges)):
        total = [0] * gr.n_vertices
        for v, a in zip(gr.legs, A):
            total[v] += a
        for (a, b), w in zip(gr.edges, ws):
            total[a] += w
            total[b] += -w
        if all(t % r == 0 for t in total):
            count += 1
    return count


def dumps(graphs: Sequence[StableGraph], A: Sequence[int] = None, r: int = None) -> str:
    rows = []
    for gr in graphs:
        row = gr.to_json()
        if r is not None:
            row["weightings"] = weighting_count(gr, A if A is not None else [0] * gr.n_legs, r)
        rows.append(row)
    return "[\n" + ",\n".join(json.dumps(r) for r in rows) + "\n]" if rows else "[]"
