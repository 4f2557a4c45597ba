from fractions import Fraction

import mpmath
import pytest

from hzcoeff.coeffs import coeff_totally_positive
from hzcoeff.lattice import PointH2, lattice_group
from hzcoeff.oracle import (
    ALL,
    PoleProximityError,
    TorusGrid,
    eval_omega,
    fft_index,
    fourier_coefficient_numeric,
    sample_grid,
    write_csv,
)
from hzcoeff.quadfield import QuadRat
from hzcoeff.weyl import OnWallError

M = Fraction(-1, 5)
Z = PointH2(mpmath.mpc(0.13, 1.1), mpmath.mpc(-0.4, 0.8))
INV = QuadRat(0, Fraction(1, 5), 5)


@pytest.fixture(scope="module")
def small():
    g = TorusGrid.scaled(M, R=24, N=32)
    return g, sample_grid(g, 4)


def test_translation_invariance():
    a = eval_omega(Z, ALL, M, 4, 30, D=5)
    w = (5 + 5 ** 0.5) / 2
    for shift in [(1, 1), (w, 5 - w)]:
        Zs = PointH2(Z.z1 + shift[0], Z.z2 + shift[1])
        b = eval_omega(Zs, ALL, M, 4, 30, D=5)
        assert abs(a.value - b.value) <= 2 * (a.tail + b.tail) + 1e-9


def test_swap_symmetry():
    a = eval_omega(Z, ALL, M, 4, 30, D=5)
    b = eval_omega(PointH2(Z.z2, Z.z1), ALL, M, 4, 30, D=5)
    assert abs(a.value - b.value) <= 2 * (a.tail + b.tail) + 1e-12


def test_stabilization():
    a = eval_omega(Z, ALL, M, 4, 20, D=5)
    b = eval_omega(Z, ALL, M, 4, 40, D=5)
    assert abs(a.value - b.value) < 2 * a.tail


def test_cosets_add_up():
    G = lattice_group(5)
    full = eval_omega(Z, ALL, M, 4, 16, D=5).value
    parts = sum(eval_omega(Z, b, M, 4, 16).value for b in G.elements() if (G.Q(b) - M).denominator == 1)
    assert abs(full - parts) < 1e-12


def test_pole_guard():
    with pytest.raises(PoleProximityError):
        eval_omega(PointH2(1j, 1j), ALL, M, 4, 4, D=5)


def test_eval_errors():
    with pytest.raises(ValueError):
        eval_omega(Z, ALL, M, 3, 10, D=5)
    with pytest.raises(ValueError):
        eval_omega(Z, ALL, Fraction(1, 5), 4, 10, D=5)
    with pytest.raises(ValueError):
        eval_omega(Z, ALL, M, 4, 10)


def test_grid_validation():
    with pytest.raises(ValueError):
        TorusGrid((0.3, 0.3), M)  # y1 y2 < |m|
    with pytest.raises(ValueError):
        TorusGrid((2, 1), M, N=48)
    with pytest.raises(OnWallError):
        TorusGrid((1, 1), M)


def test_fft_index_and_aliasing(small):
    g, s = small
    assert fft_index(QuadRat(2, 0, 5)) == (4, 10)
    assert fft_index(INV) == (0, 1)
    with pytest.raises(ValueError):
        fourier_coefficient_numeric(QuadRat(5, 0, 5), M, 4, g, s)
    with pytest.raises(ValueError):
        fourier_coefficient_numeric(QuadRat(Fraction(1, 2), 0, 5), M, 4, g, s)


def test_bessel_branch_against_closed_form(small):
    g, s = small
    num = fourier_coefficient_numeric(QuadRat(2, 0, 5), M, 4, g, s)
    exact = coeff_totally_positive(QuadRat(2, 0, 5), M, 4).integer()
    assert abs(num.real - exact) / exact < 0.01
    assert abs(num.real - exact) < 3 * num.error


def test_negative_nu_vanishes(small):
    g, s = small
    assert abs(fourier_coefficient_numeric(QuadRat(-2, 0, 5), M, 4, g, s).value) < 1e-6


def test_dft_resolution_consistency(small):
    g, s = small
    g2 = TorusGrid(g.y, M, N=64, R=24)
    s2 = sample_grid(g2, 4)
    for nu in (QuadRat(2, 0, 5), INV):
        a = fourier_coefficient_numeric(nu, M, 4, g, s)
        b = fourier_coefficient_numeric(nu, M, 4, g2, s2)
        assert abs(a.value - b.value) < a.error + b.error


def test_chamber_constancy(small):
    g, s = small
    g2 = TorusGrid.scaled(M, base=(3, 1), R=24, N=32)
    s2 = sample_grid(g2, 4)
    for nu in (INV, QuadRat(2, 0, 5)):
        a = fourier_coefficient_numeric(nu, M, 4, g, s)
        b = fourier_coefficient_numeric(nu, M, 4, g2, s2)
        assert abs(a.real - b.real) < a.error + b.error


def test_wall_crossing(small):
    g, s = small
    g2 = TorusGrid.scaled(M, base=(1, 2), R=24, N=32)
    s2 = sample_grid(g2, 4)
    here = [round(fourier_coefficient_numeric(nu, M, 4, g, s).real) for nu in (INV, -INV)]
    there = [round(fourier_coefficient_numeric(nu, M, 4, g2, s2).real) for nu in (INV, -INV)]
    assert here == [1, 0] and there == [0, 1]
    # totally positive coefficients do not see the wall
    a = fourier_coefficient_numeric(QuadRat(2, 0, 5), M, 4, g, s)
    b = fourier_coefficient_numeric(QuadRat(2, 0, 5), M, 4, g2, s2)
    assert abs(a.real - b.real) < a.error + b.error


def test_csv_dump(small, tmp_path):
    g, s = small
    c = fourier_coefficient_numeric(INV, M, 4, g, s)
    path = tmp_path / "grid.csv"
    write_csv(path, s, [c])
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# grid") and "tail=heuristic" in lines[0]
    assert len(lines) == 2 + 32 * 32 + 3
