from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nckdv.diffpoly import DiffPoly2
from nckdv.hierarchy import lax_operator
from nckdv.psido import NotMonicOrderTwo, PsiDO, Truncation, TruncationMismatch, gen_binomial

T = Truncation(-6, 4)
U = lambda *a, **k: DiffPoly2.u(*a, laurent=True, **k)  # noqa: E731
ONE = DiffPoly2.one(True)


def op(coeffs, trunc=T):
    return PsiDO(coeffs, trunc)


def test_truncation_defaults():
    t = Truncation.for_flow(2)
    assert (t.depth_floor, t.eps_max) == (-7, 6)
    assert t.deepened().depth_floor == -9 and t.deepened().eps_max == 8
    with pytest.raises(ValueError):
        Truncation(1, 4)


def test_gen_binomial():
    assert [gen_binomial(-1, k) for k in range(4)] == [1, -1, 1, -1]
    assert gen_binomial(3, 4) == 0
    assert gen_binomial(-2, 2) == 3


def test_compose_dx_with_function():
    b = U()
    res = op({1: ONE}).compose(op({0: b}))
    assert res == op({0: U(1, 0), 1: b})


def test_compose_identity_and_inverse():
    A = op({2: ONE, 0: U(eps=-2, coeff=2), -1: U(1, 0)})
    assert A.compose(PsiDO.identity(T)) == A
    assert op({-1: ONE}).compose(op({1: ONE})) == PsiDO.identity(T)


def test_positive_part():
    assert op({2: ONE, -1: U()}).positive_part() == op({2: ONE})
    assert not op({-2: U()}).positive_part().coeffs
    L = lax_operator(T)
    assert L.positive_part() == L


def test_commutator():
    A = op({2: ONE, -1: U()})
    assert not A.commutator(A).coeffs
    assert op({1: ONE}).commutator(op({0: U()})) == op({0: U(1, 0)})


def test_truncation_mismatch():
    with pytest.raises(TruncationMismatch):
        op({0: ONE}).compose(op({0: ONE}, Truncation(-4, 4)))


def test_sqrt():
    assert op({2: ONE}).sqrt() == op({1: ONE})
    L = lax_operator(T)
    B = L.sqrt()
    assert B.coeff(1) == ONE and B.coeff(0) == DiffPoly2.zero(True)
    assert B.coeff(-1) == U(eps=-2)
    assert B.compose(B).equal_within(L)
    with pytest.raises(NotMonicOrderTwo):
        op({1: ONE}).sqrt()


def test_json_round_trip():
    A = op({2: ONE, -1: U(1, 1, coeff=Fraction(-2, 3), eps=-2)})
    obj = A.to_json()
    assert obj["trunc"] == {"depth": -6, "eps_max": 4}
    assert PsiDO.from_json(obj) == A


var = st.tuples(st.integers(0, 1), st.integers(0, 1))
coeff_poly = st.lists(st.tuples(var, st.integers(-2, 2)), min_size=1, max_size=2).map(
    lambda items: sum((DiffPoly2.monomial([v], c, laurent=True) for v, c in items), DiffPoly2.zero(True)))
operators = st.dictionaries(st.integers(-2, 1), coeff_poly, min_size=1, max_size=2).map(
    lambda d: op(d, Truncation(-4, 3)))


@given(operators, operators, operators)
def test_compose_associative(a, b, c):
    # orders below the depth floor are lost; compare where both sides are exact
    assert a.compose(b).compose(c).equal_within(a.compose(b.compose(c)))


@given(st.lists(st.tuples(var, st.integers(-2, 2)), min_size=1, max_size=3))
def test_sqrt_defining_relation(items):
    t = Truncation(-6, 3)
    a0 = sum((DiffPoly2.monomial([v], c, laurent=True) for v, c in items), DiffPoly2.zero(True))
    A = PsiDO({2: ONE, 0: a0}, t)
    B = A.sqrt()
    assert B.compose(B).equal_within(A)
