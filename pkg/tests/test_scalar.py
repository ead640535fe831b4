from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nckdv.scalar import I, ONE, ZERO, Scalar, frac_str, i_power

rats = st.builds(Fraction, st.integers(-99, 99), st.integers(1, 50))
scalars = st.builds(Scalar, rats, rats)


def test_i_squared():
    assert I * I == Scalar(-1, 0)
    assert [i_power(k) for k in range(5)] == [ONE, I, Scalar(-1), Scalar(0, -1), ONE]


def test_lowest_terms():
    s = Scalar(Fraction(6, -4), Fraction(10, 15))
    assert s.to_json() == {"re": "-3/2", "im": "2/3"}
    assert frac_str(Fraction(4, 2)) == "2"


def test_compares_with_rationals():
    assert Scalar(Fraction(1, 3)) == Fraction(1, 3)
    assert Scalar(0, 1) != 0
    assert not ZERO


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


@given(scalars, scalars, scalars)
def test_field_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ZERO
    if b:
        assert (a / b) * b == a


@given(scalars)
def test_json_round_trip(a):
    assert Scalar.from_json(a.to_json()) == a
