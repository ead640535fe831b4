from fractions import Fraction

import pytest

from nckdv.predictors import bssz, check_rjg, dvv_intersection, one_psi_pixton
from nckdv.tausolver import (FitValidationFailed, IntersectionKey, IntersectionTable, _Context,
                             dilaton_relations, flow_relations, make_key, polynomial_fit, seed,
                             solve, string_relations, table_keys)


@pytest.fixture(scope="module")
def small():
    return solve(1, 3, 3, 2)


@pytest.fixture(scope="module")
def genus_two():
    return solve(2, 2, 3, 3)


def test_keys_canonical():
    k = make_key(1, 1, (2, -2), (0, 1))
    assert k == make_key(1, 1, (-2, 2), (1, 0))
    assert k.pairs == ((-2, 1), (2, 0))
    with pytest.raises(ValueError):
        make_key(0, 1, (0, 0, 0), (0, 0, 0))
    with pytest.raises(ValueError):
        make_key(1, 0, (1, 0), (1, 0))


def test_seed():
    t = seed(IntersectionTable(), 1)
    assert t.value(0, 0, (0, 0, 0), (0, 0, 0)) == 1
    assert t.value(0, 0, (1, -1, 0), (0, 0, 0)) == 1
    assert all(t.provenance[k] == "seed" for k in t.values)
    assert t.value(0, 0, (1, 0, 0), (0, 0, 0)) == 0  # modes do not sum to zero


def test_string_descent():
    keys = table_keys(0, 4, 1)
    eqs = {str(e) for e in string_relations(keys)}
    k = make_key(0, 0, (0, 1, -1, 0), (1, 0, 0, 0))
    low = make_key(0, 0, (1, -1, 0), (0, 0, 0))
    assert any(str(k) in e and str(low) in e for e in eqs)
    table, report = solve(0, 4, 1, 1)
    assert table[k] == 1


def test_dilaton_constant_once():
    keys = table_keys(1, 2, 1)
    consts = [e for e in dilaton_relations(keys) if () in e.terms]
    assert len(consts) == 1
    (eq,) = consts
    (key,) = [m[0] for m in eq.terms if m]
    assert (key.g, key.n, key.j) == (1, 1, 0) and eq.terms[()] == Fraction(-1, 24)


def test_dilaton_factor():
    keys = [make_key(0, 0, (0, 0, 0, 0), (1, 0, 0, 0))]
    (eq,) = dilaton_relations(keys)
    lower = make_key(0, 0, (0, 0, 0), (0, 0, 0))
    assert eq.terms[(lower,)] == -1


def test_genus_one_flow_one():
    table, report = solve(1, 2, 3, 1)
    assert report.inconsistent == 0
    for a in range(4):
        assert table.value(1, 1, (a, -a), (1, 0)) == Fraction(a * a - 1, 24) == bssz(1, a)
    assert table.value(1, 0, (0,), (1,)) == Fraction(1, 24) == dvv_intersection(1, [1])


def test_flow_relations_tagged():
    eqs, dropped = flow_relations(1, 1, 2, 1)
    assert eqs and all(e.source.startswith("flow 1") for e in eqs)


def test_minimal_consistency():
    table, report = solve(1, 2, 1, 1)
    assert report.inconsistent == 0
    assert all(l.inconsistent == 0 for l in report.levels)


def test_dvv_agreement(small):
    table, report = small
    assert report.inconsistent == 0
    zero = [(k, v) for k, v in table.items() if k.j == 0]
    assert zero
    for k, v in zero:
        assert v == dvv_intersection(k.g, k.D)


def test_genus_two_one_psi(genus_two):
    table, report = genus_two
    for a in range(4):
        assert table.value(2, 1, (a, -a), (4, 0)) == Fraction(a * a - 1, 576)
        for j in range(3):
            assert table.value(2, j, (a, -a), (5 - j, 0)) == one_psi_pixton(2, j, a)


def test_values_rational(small):
    table, _ = small
    assert all(isinstance(v, Fraction) for v in table.values.values())


def test_mode_bound_stability():
    t1, _ = solve(1, 3, 1, 2)
    t2, _ = solve(1, 3, 2, 2)
    assert all(t2[k] == v for k, v in t1.items() if k in t2)
    assert set(t1.values) <= set(t2.values)


def test_extra_points_pin_boundary():
    t0, r0 = solve(1, 3, 2, 2)
    t1, r1 = solve(1, 3, 2, 2, extra_points=1)
    assert r1.inconsistent == 0 and len(r1.undetermined) < len(r0.undetermined)
    assert all(t1[k] == v for k, v in t0.items())
    for k in r0.undetermined:
        assert t1[k] == dvv_intersection(k.g, k.D) if k.j == 0 else k in t1


def test_rjg_from_table():
    table, _ = solve(2, 3, 3, 3)
    for g in range(3):
        for j in range(g + 1):
            for a in range(4):
                assert check_rjg(g, j, a, table)


def test_polynomial_fit(small):
    table, _ = small
    p = polynomial_fit(table, 1, 1, (1, 0), samples=[(0,), (1,), (2,), (3,)])
    assert p.coeffs == {(0,): Fraction(-1, 24), (2,): Fraction(1, 24)}
    assert p.is_even()
    q = polynomial_fit(table, 1, 0, (1, 1))
    assert q.degree() == 0 and q(2) == Fraction(1, 24)
    with pytest.raises(FitValidationFailed):
        polynomial_fit(table, 1, 1, (1, 0), samples=[(0,), (1,), (2,)])


def test_fit_rejects_non_polynomial():
    t = IntersectionTable()
    for a, v in [(0, 0), (1, 1), (2, 0), (3, 5)]:
        t.set(make_key(1, 1, (a, -a), (1, 0)), v)
    with pytest.raises(FitValidationFailed):
        polynomial_fit(t, 1, 1, (1, 0))


def test_json_round_trip(small):
    table, report = small
    again = IntersectionTable.from_json(table.to_json())
    assert again.values == table.values and again.provenance == table.provenance
    rows = table.to_json()
    assert rows[0].keys() == {"g", "j", "A", "D", "value", "provenance"}
    assert report.to_json()["inconsistent"] == 0
