from itertools import product

import pytest

from nckdv.stablegraphs import (StableGraph, aut_order, aut_order_bruteforce, dumps,
                                enumerate_graphs, weighting_count)


@pytest.mark.parametrize("g,n,count", [(0, 3, 1), (0, 4, 4), (0, 5, 26), (1, 1, 2), (1, 2, 5),
                                       (2, 0, 7), (3, 0, 42)])
def test_counts(g, n, count):
    graphs = enumerate_graphs(g, n)
    assert len(graphs) == count
    assert len(set(graphs)) == count
    for gr in graphs:
        assert gr.genus == g and gr.n_legs == n
        assert gr.is_stable() and gr.is_connected()


def test_canonical_form_independent_of_labels():
    gr = StableGraph((0, 1, 0), [(0, 1), (1, 2), (2, 2)], [0, 0, 2])
    for perm in [(1, 2, 0), (2, 0, 1), (0, 2, 1)]:
        assert gr.relabel(perm).canonical()._key() == gr.canonical()._key()


def test_aut_examples():
    assert aut_order(StableGraph((2,), [], [0])) == 1
    assert aut_order(StableGraph((0,), [(0, 0)], [0])) == 2
    assert aut_order(StableGraph((1, 1), [(0, 1)], [])) == 2


@pytest.mark.parametrize("g,n", [(1, 1), (1, 2), (2, 0), (2, 1), (0, 5), (2, 2)])
def test_aut_matches_bruteforce(g, n):
    for gr in enumerate_graphs(g, n):
        assert aut_order(gr) == aut_order_bruteforce(gr)


def test_weighting_examples():
    loop = StableGraph((0,), [(0, 0)], [0])
    assert weighting_count(loop, (0,), 5) == 5
    assert all(weighting_count(gr, (0,), 1) == 1 for gr in enumerate_graphs(1, 1))
    with pytest.raises(ValueError):
        weighting_count(loop, (1,), 3)


def test_weighting_count_law():
    for g in range(3):
        for n in range(3):
            if 2 * g - 2 + n <= 0:
                continue
            for gr in enumerate_graphs(g, n):
                for A in product(range(-2, 3), repeat=n):
                    if sum(A):
                        continue
                    for r in (1, 2, 3, 5):
                        assert weighting_count(gr, A, r) == r ** gr.h1


def test_dumps():
    text = dumps(enumerate_graphs(1, 1), (0,), 3)
    assert '"weightings": 3' in text and '"aut": 2' in text
