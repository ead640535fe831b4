"""Incremental sparse row reduction over Q.

Rows are dicts ``column -> Fraction`` with a right-hand side.  The stored
rows are kept in reduced row echelon form, so a column is determined exactly
when its pivot row has no other entries, whatever order rows arrived in.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Tuple

Row = Dict[Hashable, Fraction]


class Inconsistent(ArithmeticError):
    def __init__(self, message: str, residual: Fraction, tag=None):
        super().__init__(message)
        self.residual = residual
        self.tag = tag


class SparseRREF:
    def __init__(self):
        self.rows: Dict[Hashable, Tuple[Row, Fraction]] = {}
        # column -> pivots whose rows mention it (free columns only)
        self._users: Dict[Hashable, set] = {}
        self.tags: Dict[Hashable, object] = {}

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, row: Row, rhs: Fraction) -> Tuple[Row, Fraction]:
        row = {c: Fraction(v) for c, v in row.items() if v}
        rhs = Fraction(rhs)
        for col in [c for c in row if c in self.rows]:
            factor = row.get(col)
            if not factor:
                continue
            prow, prhs = self.rows[col]
            for c, v in prow.items():
                s = row.get(c, 0) - factor * v
                if s:
                    row[c] = s
                else:
                    row.pop(c, None)
            rhs -= factor * prhs
        return row, rhs

    def add(self, row: Row, rhs=0, tag=None) -> str:
        """Insert ``row . x = rhs``; returns ``"new"`` or ``"redundant"``.

        Raises :class:`Inconsistent` when the row reduces to ``0 = c != 0``.
        """
        row, rhs = self.reduce(row, rhs)
        if not row:
            if rhs:
                raise Inconsistent(f"equation reduces to 0 = {rhs}", rhs, tag)
            return "redundant"
        # sparsest useful choice: the column touched by the fewest stored rows
        pivot = min(row, key=lambda c: (len(self._users.get(c, ())), repr(c)))
        inv = 1 / row[pivot]
        row = {c: v * inv for c, v in row.items()}
        rhs *= inv
        # clear the new pivot out of every stored row that uses it
        for other in list(self._users.get(pivot, ())):
            orow, orhs = self.rows[other]
            factor = orow[pivot]
            for c, v in row.items():
                s = orow.get(c, 0) - factor * v
                if s:
                    if c not in orow and c != other:
                        self._users.setdefault(c, set()).add(other)
                    orow[c] = s
                else:
                    orow.pop(c, None)
                    if c != other:
                        self._users.get(c, set()).discard(other)
            self.rows[other] = (orow, orhs - factor * rhs)
        self._users.pop(pivot, None)
        self.rows[pivot] = (row, rhs)
        for c in row:
            if c != pivot:
                self._users.setdefault(c, set()).add(pivot)
        self.tags[pivot] = tag
        return "new"

    def value(self, col) -> Optional[Fraction]:
        entry = self.rows.get(col)
        if entry is None or len(entry[0]) != 1:
            return None
        return entry[1]

    def determined(self) -> Dict[Hashable, Fraction]:
        return {c: rhs for c, (row, rhs) in self.rows.items() if len(row) == 1}


def solve_exact(rows: Iterable[Tuple[Row, Fraction]], columns: List[Hashable]) -> Dict[Hashable, Fraction]:
    """Unique solution of a (possibly overdetermined) system, or raise.

    Raises :class:`Inconsistent` for a contradiction and ``ValueError`` when
    some column is left free.
    """
    sys = SparseRREF()
    for row, rhs in rows:
        sys.add(row, rhs)
    sol = sys.determined()
    free = [c for c in columns if c not in sol]
    if free:
        raise ValueError(f"underdetermined: {len(free)} free columns")
    return {c: sol[c] for c in columns}
