from fractions import Fraction

import pytest

from nckdv.diffpoly import DiffPoly2, moyal
from nckdv.hierarchy import (FlowTable, check_commutativity, check_shape, classical_flow,
                             dispersionless_flow, double_factorial, flow, genus_part, genus_parts,
                             lax_operator)
from nckdv.psido import Truncation
from nckdv.verify import reference_classical_flow, reference_flow

U = DiffPoly2.u


def test_double_factorial():
    assert [double_factorial(k) for k in (1, 3, 5, 7)] == [1, 3, 15, 105]


def test_flow_one_closed_form():
    p = flow(1)
    assert p == reference_flow(1)
    assert p.coeff((0, 0, ((0, 0), (0, 0)))) == Fraction(1, 2)
    assert p.coeff((2, 0, ((2, 0),))) == Fraction(1, 12)


def test_flow_two_closed_form():
    assert flow(2) == reference_flow(2)


def test_classical_flow_two():
    assert classical_flow(2) == reference_classical_flow(2)
    assert classical_flow(1) == (U() * U()).scale(Fraction(1, 2)) + U(2, 0, coeff=Fraction(1, 12), eps=2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_mu_zero_is_classical(n):
    assert flow(n).at_mu_zero() == classical_flow(n)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_genus_decomposition(n):
    p = flow(n)
    assert genus_part(p, 0) == dispersionless_flow(n)
    assert check_shape(n, p) == []
    assert sum(genus_parts(p).values(), DiffPoly2.zero()) == p


@pytest.mark.parametrize("n", [1, 2])
def test_deepening_stability(n):
    t = Truncation.for_flow(n)
    deeper = flow(n, t.deepened())
    assert deeper.truncate(eps_max=t.eps_max) == flow(n)


def test_order_zero_commutator():
    t = Truncation.for_flow(1)
    L = lax_operator(t)
    R = L.power_half(1).positive_part().commutator(L)
    assert set(R.coeffs) == {0}


def test_reality():
    for n in (1, 2, 3):
        assert flow(n).is_real()


def test_commutativity_small():
    assert check_commutativity(1, 2, eps_max=6)


def test_flow_table_json():
    ft = FlowTable.build([1, 2])
    rows = ft.to_json()
    assert [r["n"] for r in rows] == [1, 2]
    assert DiffPoly2.from_json(rows[0]["P"]) == flow(1)
    assert ft.to_tsv().splitlines()[0] == "n\teps\tmu\tre\tim\tvars"


def test_bad_index():
    with pytest.raises(ValueError):
        flow(0)
