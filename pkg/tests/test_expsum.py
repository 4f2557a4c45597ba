from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from hzcoeff.expsum import ExpSumTable, G_direct, NuSums, crt_multipliers, factor_prime_powers, spf_table
from hzcoeff.quadfield import QuadRat

ctx = mpmath.mp.clone()
ctx.prec = 128
SPF = spf_table(200)

CASES = [
    (5, Fraction(-1, 5)),
    (5, Fraction(-1)),
    (8, Fraction(-1, 8)),
    (13, Fraction(-1, 13)),
    (12, Fraction(-1, 4)),
]


@pytest.mark.parametrize("D,m", CASES)
@pytest.mark.parametrize("alpha", [1, 2, 3, 4, 5, 6, 8, 9, 10, 12, 15, 25])
def test_crt_matches_direct(D, m, alpha):
    tab = ExpSumTable(D, m)
    for u, v in [(1, 2), (3, 4), (-2, 7), (0, 3)]:
        nu = QuadRat.from_dual_basis(u, v, D)
        fac = factor_prime_powers(alpha, SPF)
        got = NuSums(tab, nu).G_mp(alpha, fac, ctx)
        want = G_direct(D, m, nu, alpha, ctx)
        assert abs(got - want) < mpmath.mpf(10) ** -25


@pytest.mark.parametrize("alpha", [2, 5, 6, 10, 30])
def test_float_path_matches(alpha):
    D, m = 5, Fraction(-1, 5)
    tab = ExpSumTable(D, m)
    nu = QuadRat(Fraction(5, 2), Fraction(-1, 10), 5)
    fac = factor_prime_powers(alpha, SPF)
    sums = NuSums(tab, nu)
    g, err = sums.G_float(alpha, fac)
    want = sums.G_mp(alpha, fac, ctx)
    assert abs(complex(want) - g) <= err + 1e-12


def test_class_restricted_sums_add_up():
    D, m = 5, Fraction(-1, 5)
    tab = ExpSumTable(D, m)
    nu = QuadRat(2, 0, 5)
    for alpha in (3, 5, 10):
        total = G_direct(D, m, nu, alpha, ctx)
        parts = sum(G_direct(D, m, nu, alpha, ctx, classes={c}) for c in range(len(tab.class_reps)))
        assert abs(total - parts) < mpmath.mpf(10) ** -25


@given(st.integers(2, 200))
def test_factor_prime_powers(n):
    fac = factor_prime_powers(n, SPF)
    prod = 1
    for p, e, q in fac:
        assert q == p ** e
        prod *= q
    assert prod == n


@given(st.integers(2, 200))
def test_crt_multipliers(n):
    qs = [q for _, _, q in factor_prime_powers(n, SPF)]
    us = crt_multipliers(n, qs)
    assert sum(u * (n // q) for u, q in zip(us, qs)) == 1


def test_G_real_for_full_sum():
    # lam -> -lam symmetry makes the full sum real
    D, m = 5, Fraction(-1, 5)
    nu = QuadRat(Fraction(3, 2), Fraction(-3, 10), 5)
    for alpha in (2, 7, 11):
        assert abs(G_direct(D, m, nu, alpha, ctx).imag) < mpmath.mpf(10) ** -25
