from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nckdv.diffpoly import DiffPoly2, moyal
from nckdv.fourier import (ModeArityError, ModePoly, mode_component, mode_expand, mode_moyal,
                           t_inverse_transform, t_transform)
from nckdv.hierarchy import flow
from nckdv.predictors import Q
from nckdv.scalar import I

U = DiffPoly2.u


def test_mode_expand_single():
    assert mode_expand(U(0, 1), [3]) == ModePoly.variable(3, 0, I * 3)
    assert mode_expand(U(2, 2), [2]) == ModePoly.variable(2, 2, -4)


def test_arity():
    with pytest.raises(ModeArityError):
        mode_expand(U() * U(), [1])


def test_homogeneity_enforced():
    with pytest.raises(ValueError):
        ModePoly({(0, 0, ((1, 0),)): 1}, 2)


def test_t1_display_relation():
    # the per-mode display is the mode form of dx(u*u); the flow carries the 1/2
    modes = [-2, -1, 0, 1, 2]
    dp = flow(1).dx()
    uu = moyal(U(), U(), mu_max=4, eps_max=4).dx()
    for a in (0, 1, 2):
        expected = mode_component(uu, a, modes).scale(Fraction(1, 2)) + \
            mode_component(U(3, 0, coeff=Fraction(1, 12), eps=2), a, modes)
        assert mode_component(dp, a, modes) == expected


@given(st.integers(-3, 3), st.integers(-3, 3))
def test_star_compatibility(b, c):
    # the e^{i(b+c)y} part of f*g for u = v^b e^{iby} + v^c e^{icy}
    f, g = U(1, 0), U()
    lhs = mode_component(moyal(f, g, mu_max=3), b + c, [b, c])
    pairs = {(b, c), (c, b)}
    rhs = ModePoly.zero(b + c)
    for x, y in sorted(pairs):
        rhs = rhs + mode_moyal(ModePoly.variable(x, 1), ModePoly.variable(y, 0), 3)
    assert lhs == rhs


@given(st.integers(-4, 4))
def test_t_transform_inverse(a):
    p = ModePoly.variable(a, 0) * ModePoly.variable(0, 1)
    q = t_inverse_transform(a, t_transform(a, p, 6), 6).truncate(eps_max=6)
    assert q == p


def test_t_transform_coefficients():
    p = ModePoly.variable(2, 0)
    t = t_transform(2, p, 2)
    assert t.coeff((2, 2, ((2, 2),))) == Q(1)(2)


def test_json():
    p = ModePoly.variable(1, 2, Fraction(1, 3), eps=2) * ModePoly.variable(-1, 0)
    obj = p.to_json()
    assert obj["total_mode"] == 0
    assert obj["monomials"][0]["vars"] == [[-1, 0], [1, 2]]
