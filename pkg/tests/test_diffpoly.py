from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nckdv.diffpoly import (DiffPoly2, EpsLeak, NotATotalDerivative, moyal, moyal_coefficient,
                            odd_even_parts, star_power)
from nckdv.scalar import I, Scalar

U = DiffPoly2.u


def poly_strategy(max_terms=3):
    var = st.tuples(st.integers(0, 2), st.integers(0, 2))
    mono = st.tuples(st.lists(var, min_size=1, max_size=2), st.integers(-3, 3), st.integers(0, 1))

    def build(items):
        p = DiffPoly2.zero()
        for vars, c, e in items:
            p = p + DiffPoly2.monomial(vars, c, eps=e)
        return p
    return st.lists(mono, min_size=1, max_size=max_terms).map(build)


polys = poly_strategy()


def test_grading():
    assert U(1, 2).degree() == (1, 2)
    assert U(eps=2).degree() == (-2, 0)
    assert (U() * U(2, 0)).degree() == (2, 0)
    assert U(0, 0, mu=1).degree() == (0, -1)


def test_dx_dy():
    assert U().dx() == U(1, 0)
    assert (U() * U()).dx() == U() * U(1, 0) * 2
    assert (U(1, 0) * U(0, 1)).dy() == U(1, 1) * U(0, 1) + U(1, 0) * U(0, 2)


def test_moyal_coefficient():
    assert moyal_coefficient(0, 0) == 1
    assert moyal_coefficient(1, 0) == I * Fraction(1, 2)
    assert moyal_coefficient(0, 1) == I * Fraction(-1, 2)
    assert moyal_coefficient(1, 1) == Scalar(Fraction(1, 4))


def test_moyal_first_order():
    # u*u at first order: (i/2) eps mu (u_x u_y - u_y u_x) = 0
    p = moyal(U(), U(), mu_max=1)
    assert p == U() * U()


def test_moyal_commutator():
    # [u, u_x] = i eps mu (u_x u_xy ... ) : leading term of u*v - v*u is i eps mu {u, v}
    v = U(1, 0)
    comm = moyal(U(), v, mu_max=1) - moyal(v, U(), mu_max=1)
    expected = (U(1, 0) * U(1, 1) - U(0, 1) * U(2, 0)).shift(eps=1, mu=1).scale(I)
    assert comm == expected


def test_moyal_constant_factor_terminates():
    assert moyal(DiffPoly2.const(3), U()) == U().scale(3)
    with pytest.raises(ValueError):
        moyal(U(), U())


def test_mu_zero_degeneration():
    p = moyal(U(1, 0), U(0, 2), mu_max=4)
    assert p.at_mu_zero() == U(1, 0) * U(0, 2)


def test_x_integrate():
    f = (U() * U()).scale(Fraction(1, 2)) + U(2, 0).shift(eps=2).scale(Fraction(1, 12))
    assert f.dx().x_integrate() == f
    with pytest.raises(NotATotalDerivative):
        (U() * U()).x_integrate()


def test_eps_leak():
    with pytest.raises(EpsLeak):
        DiffPoly2({(-2, 0, ((0, 0),)): 1})
    assert DiffPoly2({(-2, 0, ((0, 0),)): 1}, laurent=True)


def test_star_power_and_parts():
    p = star_power(U(), 3, mu_max=4, eps_max=4)
    odd, even = odd_even_parts(p)
    assert odd + even == p
    assert even.at_mu_zero() == U() * U() * U()


def test_json_canonical():
    p = U() * U() * U(2, 1).scale(Fraction(-3, 4)) + U(1, 0).shift(eps=2, mu=1).scale(I)
    assert DiffPoly2.loads(p.dumps()) == p
    obj = p.to_json()
    assert obj["monomials"][0]["vars"] == [[0, 0, 2], [2, 1, 1]]


@given(polys, polys, polys)
def test_moyal_associative(f, g, h):
    cap = 3
    assert moyal(moyal(f, g, mu_max=cap), h, mu_max=cap) == moyal(f, moyal(g, h, mu_max=cap), mu_max=cap)


@given(polys, polys)
def test_moyal_graded(f, g):
    if f.is_homogeneous() and g.is_homogeneous() and f and g:
        p = moyal(f, g, mu_max=3)
        if p:
            assert p.is_homogeneous()
            assert p.degree() == tuple(a + b for a, b in zip(f.degree(), g.degree()))


@given(polys, polys)
def test_moyal_leibniz(f, g):
    cap = 3
    p = moyal(f, g, mu_max=cap)
    assert p.dx() == moyal(f.dx(), g, mu_max=cap) + moyal(f, g.dx(), mu_max=cap)


@given(polys, polys)
def test_swap_parity(f, g):
    # g*f is f*g with the odd Moyal orders negated
    cap = 3
    odd, even = odd_even_parts(moyal(f, g, mu_max=cap))
    odd2, even2 = odd_even_parts(moyal(g, f, mu_max=cap))
    assert even == even2 and odd == -odd2


@given(polys)
def test_dx_dy_commute(f):
    assert f.dx().dy() == f.dy().dx()


@given(polys)
def test_json_round_trip(f):
    assert DiffPoly2.loads(f.dumps()) == f
