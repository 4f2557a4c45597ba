from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hzcoeff.quadfield import (
    QuadRat,
    format_quadrat,
    fundamental_unit,
    in_inverse_different,
    in_ring_of_integers,
    is_fundamental_discriminant,
    is_totally_positive,
    norm_and_trace,
    parse_quadrat,
    primitive_part,
)

DISCS = [5, 8, 12, 13, 17, 21, 24, 29]
fracs = st.fractions(min_value=-50, max_value=50, max_denominator=30)


@given(st.sampled_from(DISCS), fracs, fracs, fracs, fracs)
def test_norm_trace_multiplicative(D, a, b, c, d):
    x, y = QuadRat(a, b, D), QuadRat(c, d, D)
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x + y).trace() == x.trace() + y.trace()
    assert x.conjugate().conjugate() == x
    n, t = norm_and_trace(x)
    assert n == a * a - D * b * b and t == 2 * a


@given(st.sampled_from(DISCS), fracs, fracs)
def test_sign_matches_float(D, a, b):
    x = QuadRat(a, b, D)
    f = float(a) + float(b) * D ** 0.5
    if abs(f) > 1e-9:
        assert x.sign() == (1 if f > 0 else -1)


@given(st.sampled_from(DISCS), st.integers(-40, 40), st.integers(-40, 40))
def test_dual_basis_round_trip(D, u, v):
    nu = QuadRat.from_dual_basis(u, v, D)
    assert in_inverse_different(nu)
    assert nu.dual_coords() == (u, v)
    assert nu.trace() == v


@pytest.mark.parametrize("D", DISCS)
def test_fundamental_unit(D):
    eps = fundamental_unit(D)
    assert abs(eps.norm()) == 1
    assert in_ring_of_integers(eps)
    assert eps > 1


def test_fundamental_unit_golden():
    assert fundamental_unit(5) == QuadRat(Fraction(1, 2), Fraction(1, 2), 5)
    assert fundamental_unit(8) == QuadRat(1, Fraction(1, 2), 8)  # 1 + sqrt(2)


def test_membership_examples():
    assert in_ring_of_integers(QuadRat(Fraction(1, 2), Fraction(1, 2), 5))
    assert not in_ring_of_integers(QuadRat(Fraction(1, 2), 0, 5))
    assert in_inverse_different(QuadRat(0, Fraction(1, 5), 5))
    assert not in_inverse_different(QuadRat(Fraction(1, 2), 0, 5))


def test_primitive_part_examples():
    assert primitive_part(QuadRat(2, 0, 5)) == (QuadRat(1, 0, 5), 2)
    nu0, ell = primitive_part(QuadRat(Fraction(5, 2), Fraction(1, 2), 5))
    assert ell == 5 and nu0.norm() == Fraction(1, 5)
    nu0, ell = primitive_part(QuadRat(2, Fraction(-2, 5), 5))
    assert ell == 4 and nu0.norm() == Fraction(1, 5)


@given(st.sampled_from(DISCS), st.integers(-30, 30), st.integers(-30, 30))
def test_primitive_part_is_primitive(D, u, v):
    nu = QuadRat.from_dual_basis(u, v, D)
    if not nu:
        return
    nu0, ell = primitive_part(nu)
    assert ell > 0 and nu0 * ell == nu
    for p in (2, 3, 5, 7):
        assert not in_inverse_different(nu0 / p)


@given(st.sampled_from(DISCS), fracs, fracs)
def test_format_parse_round_trip(D, a, b):
    x = QuadRat(a, b, D)
    assert parse_quadrat(format_quadrat(x), D) == x


def test_parse_forms():
    assert parse_quadrat("sqrt(5)/5", 5) == QuadRat(0, Fraction(1, 5), 5)
    assert parse_quadrat("(1, 0)", 5) == QuadRat(0, Fraction(1, 5), 5)
    assert parse_quadrat("0, 1", 5) == QuadRat(Fraction(1, 2), Fraction(1, 2), 5)
    assert parse_quadrat("7/2 + 1/2*sqrt(5)", 5) == QuadRat(Fraction(7, 2), Fraction(1, 2), 5)
    with pytest.raises(ValueError):
        parse_quadrat("1 + sqrt(3)", 5)


def test_totally_positive():
    assert is_totally_positive(QuadRat(2, 0, 5))
    assert not is_totally_positive(QuadRat(Fraction(1, 2), Fraction(1, 2), 5))


def test_fundamental_discriminants():
    assert [d for d in range(2, 30) if is_fundamental_discriminant(d)] == [5, 8, 12, 13, 17, 21, 24, 28, 29]
