import random
from fractions import Fraction

import pytest

from nckdv.linalg import Inconsistent, SparseRREF, solve_exact


def test_small_system():
    s = SparseRREF()
    assert s.add({"x": 1, "y": 1}, 3) == "new"
    assert s.add({"x": 1, "y": -1}, 1) == "new"
    assert s.add({"x": 2}, 4) == "redundant"
    assert s.determined() == {"x": 2, "y": 1}
    with pytest.raises(Inconsistent):
        s.add({"y": 1}, 2)


def test_underdetermined():
    with pytest.raises(ValueError):
        solve_exact([({"x": 1, "y": 1}, 1)], ["x", "y"])


def test_random_overdetermined(seed):
    rng = random.Random(seed)
    cols = list(range(8))
    truth = {c: Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for c in cols}
    rows = []
    for _ in range(20):
        row = {c: Fraction(rng.randint(-3, 3)) for c in rng.sample(cols, 4)}
        rows.append((row, sum(v * truth[c] for c, v in row.items())))
    for c in cols:
        rows.append(({c: 1, (c + 1) % 8: 1}, truth[c] + truth[(c + 1) % 8]))
    assert solve_exact(rows, cols) == truth
