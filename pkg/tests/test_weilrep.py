from fractions import Fraction

import pytest

from hzcoeff.lattice import gram_matrix, lattice_group
from hzcoeff.weilrep import DiscriminantGroup, WeilRepresentation, relations_report, smith_normal_form


def _matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


@pytest.mark.parametrize("D", [5, 8, 12, 13, 21])
def test_smith_normal_form(D):
    G = gram_matrix(D)
    U, S, V = smith_normal_form(G)
    assert _matmul(_matmul(U, G), V) == S
    diag = [S[i][i] for i in range(4)]
    for a, b in zip(diag, diag[1:]):
        assert b % a == 0


@pytest.mark.parametrize("D,orders", [(5, (5,)), (8, (2, 4)), (13, (13,)), (12, (2, 6))])
def test_group_orders(D, orders):
    G = lattice_group(D)
    assert G.orders == orders
    assert G.order == D
    assert G.signature_pair == (2, 2)


def test_trivial_group():
    G = DiscriminantGroup([[0, 1], [1, 0]])
    assert G.order == 1 and G.orders == ()


def test_invalid_gram():
    with pytest.raises(ValueError):
        DiscriminantGroup([[1, 0], [0, 2]])
    with pytest.raises(ValueError):
        DiscriminantGroup([[2, 2], [2, 2]])


@pytest.mark.parametrize("D", [5, 8, 13])
def test_quadratic_form_values(D):
    G = lattice_group(D)
    for a in G.elements():
        assert G.Q(a) == G.Q(-a)
        for b in G.elements():
            # (a, b) = Q(a + b) - Q(a) - Q(b) mod 1
            assert (G.Q(a + b) - G.Q(a) - G.Q(b) - G.bilinear(a, b)).denominator == 1


@pytest.mark.parametrize("D", [5, 8, 13, 12])
@pytest.mark.parametrize("dual", [False, True])
def test_relations(D, dual):
    rep = relations_report(lattice_group(D), dual=dual)
    for key, v in rep.items():
        if key not in ("order", "signature"):
            assert v < 1e-30, key


def test_A2_relations():
    rep = relations_report(DiscriminantGroup([[2, -1], [-1, 2]]))
    assert rep["signature"] == [2, 0]
    assert max(v for k, v in rep.items() if k not in ("order", "signature")) < 1e-30


def test_dual_is_conjugate():
    G = lattice_group(5)
    S = WeilRepresentation(G).matrix("S")
    Sd = WeilRepresentation(G, dual=True).matrix("S")
    assert max(abs(S[i, j].conjugate() - Sd[i, j]) for i in range(5) for j in range(5)) < 1e-30
