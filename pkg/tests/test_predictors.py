from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nckdv.predictors import (Poly1, PowerSeries1, Q, Q_inv, bssz, check_rjg, dvv_intersection,
                              one_psi_pixton, one_psi_poly, one_psi_T, rjg, series_bg, series_S,
                              series_S_iz, series_T, witten_one_point)


def test_S_series():
    S = series_S(6)
    assert [S.coeff(k) for k in range(7)] == [1, 0, Fraction(1, 24), 0, Fraction(1, 1920), 0,
                                              Fraction(1, 322560)]


def test_Q_polynomials():
    assert Q(0) == Poly1([1])
    assert Q(1) == Poly1([Fraction(1, 24), 0, Fraction(-1, 24)])
    assert Q(2) == Poly1([Fraction(3, 5760), 0, Fraction(-10, 5760), 0, Fraction(7, 5760)])
    for g in range(4):
        assert Q(g).is_even()


@given(st.integers(-5, 5))
def test_T_series_matches_Q(a):
    T = series_T(a, 8)
    for g in range(5):
        assert T.coeff(2 * g) == Q(g)(a)


def test_Q_inverse():
    for a in range(-3, 4):
        T = PowerSeries1([Q(g)(a) if k == 2 * g else 0 for k in range(9) for g in [k // 2]], 8)
        Tinv = PowerSeries1([Q_inv(g)(a) if k % 2 == 0 else 0 for k in range(9) for g in [k // 2]], 8)
        prod = T * Tinv
        assert [prod.coeff(k) for k in range(9)] == [1] + [0] * 8


def test_b_series():
    prod = series_bg(20) * series_S_iz(20)
    assert [prod.coeff(k) for k in range(21)] == [1] + [0] * 20


def test_one_psi_values():
    assert one_psi_pixton(1, 0, 5) == Fraction(1, 24)
    assert one_psi_pixton(2, 0, 0) == Fraction(1, 1152)
    for a in range(4):
        assert one_psi_pixton(2, 1, a) == Fraction(a * a - 1, 576)
        assert one_psi_pixton(1, 1, a) == Fraction(a * a - 1, 24)
    assert one_psi_T(0, 0, 3) == 1


def test_witten_one_point():
    for g in range(1, 5):
        assert witten_one_point(g) == dvv_intersection(g, [3 * g - 2])


def test_bssz():
    assert bssz(1, 2) == Fraction(1, 8)
    assert bssz(1, 0) == Fraction(-1, 24)
    for g in (1, 2, 3):
        assert bssz(g, 1) == 0
        assert one_psi_poly(g, g) == Q_inv(g)


def test_dvv_known_values():
    assert dvv_intersection(0, [0, 0, 0]) == 1
    assert dvv_intersection(1, [1]) == Fraction(1, 24)
    assert dvv_intersection(2, [4]) == Fraction(1, 1152)
    assert dvv_intersection(2, [3, 2]) == Fraction(29, 5760)
    assert dvv_intersection(3, [7]) == Fraction(1, 82944)
    assert dvv_intersection(1, [2, 0]) == Fraction(1, 24)
    assert dvv_intersection(1, [1, 1]) == Fraction(1, 24)
    assert dvv_intersection(1, [1, 0]) == 0


@pytest.mark.parametrize("g,D", [(1, (2, 0, 1)), (2, (4, 2, 0)), (2, (3, 3, 0, 0)), (1, (3, 0, 0, 0))])
def test_dvv_string(g, D):
    # <tau_0 X> = sum <X with one index lowered>
    rest = [d for d in D]
    rest.remove(0)
    expected = sum(dvv_intersection(g, rest[:i] + [rest[i] - 1] + rest[i + 1:])
                   for i in range(len(rest)) if rest[i] > 0)
    assert dvv_intersection(g, D) == expected


@pytest.mark.parametrize("g,D", [(1, (1, 1)), (2, (1, 4)), (2, (1, 3, 2)), (3, (1, 7))])
def test_dvv_dilaton(g, D):
    rest = list(D)
    rest.remove(1)
    assert dvv_intersection(g, D) == (2 * g - 2 + len(rest)) * dvv_intersection(g, rest)


def test_rjg_closed_form():
    for g in range(4):
        for j in range(g + 1):
            for a in range(4):
                assert check_rjg(g, j, a)
    assert rjg(1, 0, 2) == Fraction(1, 24)
