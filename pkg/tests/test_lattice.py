from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from hzcoeff.lattice import (
    LatticeVector,
    PointH2,
    act,
    bilinear,
    coset_of,
    coset_of_nu,
    enumerate_vectors,
    lattice_group,
    moebius,
    numeric_Q,
    projection_norms,
    q_Z,
    q_Z_matrix,
    quadratic_form,
)
from hzcoeff.quadfield import QuadRat

ctx = mpmath.mp.clone()
ctx.prec = 128

vec = st.builds(
    lambda a, b, u, v, D: LatticeVector(a, b, QuadRat.from_dual_basis(u, v, D)),
    st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20),
    st.sampled_from([5, 13]),
)
points = st.builds(
    lambda x1, y1, x2, y2: PointH2(mpmath.mpc(x1, y1), mpmath.mpc(x2, y2)),
    st.floats(-3, 3), st.floats(0.1, 4), st.floats(-3, 3), st.floats(0.1, 4),
)
sl2 = st.lists(st.sampled_from(["S", "T", "t"]), max_size=8)


def word_matrix(word):
    g = ((1, 0), (0, 1))
    mats = {"S": ((0, -1), (1, 0)), "T": ((1, 1), (0, 1)), "t": ((1, -1), (0, 1))}
    for w in word:
        (a, b), (c, d) = g
        (e, f), (h, i) = mats[w]
        g = ((a * e + b * h, a * f + b * i), (c * e + d * h, c * f + d * i))
    return g


@given(vec, points)
def test_projection_split(X, Z):
    pos, neg = projection_norms(Z, X)
    Q = quadratic_form(X)
    assert abs(pos + neg - (ctx.mpf(Q.numerator) / Q.denominator)) < mpmath.mpf(10) ** -20 * (1 + abs(pos))
    assert pos >= 0 >= neg


@given(vec, points, sl2, sl2)
def test_q_Z_transformation(X, Z, w1, w2):
    g1, g2 = word_matrix(w1), word_matrix(w2)
    with mpmath.workprec(128):
        Y = act(g1, g2, X)
        gZ = PointH2(moebius(g1, Z.z1), moebius(g2, Z.z2))
        j = (g1[1][0] * Z.z1 + g1[1][1]) * (g2[1][0] * Z.z2 + g2[1][1])
        lhs = q_Z_matrix(gZ, Y)
        rhs = q_Z(Z, X) / j
    assert abs(lhs - rhs) <= mpmath.mpf(10) ** -20 * (1 + abs(rhs))
    Q = quadratic_form(X)
    assert abs(numeric_Q(Y) - ctx.mpf(Q.numerator) / Q.denominator) < mpmath.mpf(10) ** -20 * (1 + abs(numeric_Q(Y)))


@given(vec, vec)
def test_bilinear_polarization(X, Y):
    if X.D != Y.D:
        return
    assert bilinear(X, Y) == quadratic_form(X + Y) - quadratic_form(X) - quadratic_form(Y)


@given(vec, vec)
def test_coset_additive(X, Y):
    if X.D != Y.D:
        return
    assert coset_of(X + Y) == coset_of(X) + coset_of(Y)
    G = lattice_group(X.D)
    assert (G.Q(coset_of(X)) - quadratic_form(X)).denominator == 1


def test_coset_of_integral_is_zero():
    assert coset_of_nu(QuadRat(3, 1, 5)).is_zero()
    assert not coset_of_nu(QuadRat(0, Fraction(1, 5), 5)).is_zero()


def test_lattice_vector_json():
    X = LatticeVector(2, -3, QuadRat(Fraction(1, 2), Fraction(1, 10), 5))
    assert LatticeVector.from_json(X.to_json(), 5) == X


def test_point_validation():
    with pytest.raises(ValueError):
        PointH2(1j, -1j)


def _brute(D, m, B, beta):
    out = set()
    r = D ** 0.5
    G = lattice_group(D)
    for u in range(-4 * B * D, 4 * B * D + 1):
        for v in range(-2 * B - 1, 2 * B + 2):
            nu = QuadRat.from_dual_basis(u, v, D)
            if abs(nu) > B or abs(nu.conjugate()) > B:
                continue
            for a in range(-B, B + 1):
                for b in range(-B, B + 1):
                    X = LatticeVector(a, b, nu)
                    if quadratic_form(X) != m:
                        continue
                    if beta is not None and coset_of(X) != beta:
                        continue
                    out.add(X)
    return out


@pytest.mark.parametrize("B", [1, 2, 3])
@pytest.mark.parametrize("m", [Fraction(-1, 5), Fraction(-1), Fraction(4, 5), Fraction(0), Fraction(-6, 5)])
def test_enumeration_matches_brute_force(B, m):
    G = lattice_group(5)
    got = set(enumerate_vectors(None, m, B, D=5))
    assert got == _brute(5, m, B, None)
    for beta in G.elements():
        if (G.Q(beta) - m).denominator == 1:
            assert set(enumerate_vectors(beta, m, B)) == _brute(5, m, B, beta)


def test_enumeration_errors():
    G = lattice_group(5)
    beta = coset_of_nu(QuadRat(0, Fraction(1, 5), 5))
    with pytest.raises(ValueError):
        enumerate_vectors(beta, Fraction(0), 2)
    with pytest.raises(ValueError):
        enumerate_vectors(None, Fraction(-1, 5), 0, D=5)
    with pytest.raises(ValueError):
        enumerate_vectors(None, Fraction(-1, 5), 2)
