from fractions import Fraction

import mpmath
import pytest

from hzcoeff.lattice import PointH2
from hzcoeff.quadfield import QuadRat, fundamental_unit
from hzcoeff.weyl import (
    NotChamberConstant,
    OnWallError,
    chamber_of,
    on_divisor,
    positivity,
    slope,
    wall_representatives,
    wall_vectors,
)

M = Fraction(-1, 5)


def test_wall_representatives_have_norm_m():
    reps = wall_representatives(M, 5)
    assert reps
    for nu in reps:
        assert nu.norm() == M and nu.sign() > 0


def test_wall_vectors_sorted_and_unit_stable():
    ws = wall_vectors(M, (Fraction(1, 100), 100), 5)
    slopes = [float(slope(w).embeddings()[0]) for w in ws]
    assert slopes == sorted(slopes)
    eta = fundamental_unit(5) ** 2
    # multiplying by eta maps walls to walls
    for w in ws[:3]:
        assert (w * eta).norm() == M


def test_chamber_of_base_point(chamber5):
    assert chamber5.chamber_id() == "(-1/2 + 3/10*sqrt(5)) | (0 + 1/5*sqrt(5))"
    assert chamber_of((3, 1), M, 5).chamber_id() == chamber5.chamber_id()
    assert chamber_of((1, 2), M, 5).chamber_id() != chamber5.chamber_id()


def test_on_wall_rejected():
    with pytest.raises(OnWallError):
        chamber_of((1, 1), M, 5)  # slope of 1/sqrt(5) is 1


def test_positivity(chamber5):
    assert positivity(QuadRat(2, 0, 5), chamber5)
    assert not positivity(QuadRat(-2, 0, 5), chamber5)
    assert positivity(QuadRat(0, Fraction(1, 5), 5), chamber5)
    assert not positivity(QuadRat(0, Fraction(-1, 5), 5), chamber5)
    assert positivity(QuadRat(Fraction(1, 2), Fraction(1, 2), 5), chamber5)


def test_positivity_not_constant(chamber5):
    # slope about 0.516, strictly inside the chamber (0.146, 1)
    nu = QuadRat(Fraction(1, 2), Fraction(-7, 10), 5)
    s = float(slope(nu).embeddings()[0])
    assert 0.146 < s < 1
    with pytest.raises(NotChamberConstant):
        positivity(nu, chamber5)


def test_positivity_rejects_bad_input(chamber5):
    with pytest.raises(ValueError):
        positivity(QuadRat(0, 0, 5), chamber5)
    with pytest.raises(ValueError):
        positivity(QuadRat(Fraction(1, 2), 0, 5), chamber5)


def test_on_divisor():
    assert on_divisor(PointH2(1j, 1j), M, 5, 3)
    assert not on_divisor(PointH2(2j, 1j), M, 5, 3)
