"""Brute-force evaluation of omega_m by truncated lattice sums, and numerical
Fourier coefficients from samples on the translation torus.

This module is a cross-check for the closed forms in coeffs, not a precision
instrument.  For k = 4 the series converges only like R^(2-k), so error
estimates here are heuristic: they extrapolate from the sums at heights R/2
and R, assuming the remainder scales like R^(2-k).

Samples are taken on the torus R^2 / Lambda with Lambda = {(mu, mu')} for mu
in O_F.  The point with grid indices (i, j) is x = s + t*w with s = i/N and
t = j/N, so e(tr(nu x)) = e(s tr(nu) + t tr(nu w)) and the FFT index of nu is
(tr(nu), tr(nu w)).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .lattice import PointH2, enumerate_integral
from .quadfield import QuadRat, in_inverse_different, validate_discriminant
from .weilrep import DiscElement
from .weyl import chamber_of

ALL = "all"
DEFAULT_R = 60
DEFAULT_N = 64
DEFAULT_BASE = (2, 1)
CHUNK = 1024


class PoleProximityError(ValueError):
    """Some q_Z(X) in the truncated sum is too close to zero."""


def default_scale(m, base=DEFAULT_BASE) -> float:
    """Scale factor s with (s*y1)(s*y2) = 4|m|.

    Convergence of the expansion needs y1*y2 > |m|; at 4|m| the exponential
    factor e^(2 pi tr(nu y)) used to undo the decay stays small enough for
    the truncation error not to swamp the coefficients of interest.
    """
    return math.sqrt(4 * abs(float(m)) / (base[0] * base[1]))


@dataclass(frozen=True)
class TorusGrid:
    y: tuple
    m: Fraction
    D: int = 5
    N: int = DEFAULT_N
    R: int = DEFAULT_R

    def __post_init__(self):
        validate_discriminant(self.D)
        m = Fraction(self.m)
        object.__setattr__(self, "m", m)
        y1, y2 = (float(v) for v in self.y)
        object.__setattr__(self, "y", (y1, y2))
        if m >= 0:
            raise ValueError("m must be negative")
        if y1 <= 0 or y2 <= 0:
            raise ValueError("base point must have positive coordinates")
        if y1 * y2 <= abs(m):
            raise ValueError(f"y1*y2 = {y1 * y2} must exceed |m| = {float(abs(m))}")
        if self.N < 2 or self.N & (self.N - 1):
            raise ValueError("N must be a power of 2")
        if self.R < 2:
            raise ValueError("R must be at least 2 to estimate the tail")
        chamber_of((y1, y2), m, self.D)  # raises OnWallError

    @classmethod
    def scaled(cls, m, D: int = 5, base=DEFAULT_BASE, factor: float = 1.0, **kw) -> "TorusGrid":
        s = default_scale(m, base) * factor
        return cls((base[0] * s, base[1] * s), Fraction(m), D, **kw)

    def points(self):
        """Flattened arrays (z1, z2) over the grid, row-major in (i, j)."""
        r = math.sqrt(self.D)
        w, wc = (self.D + r) / 2, (self.D - r) / 2
        s = np.arange(self.N) / self.N
        S, T = np.meshgrid(s, s, indexing="ij")
        z1 = (S + T * w + 1j * self.y[0]).ravel()
        z2 = (S + T * wc + 1j * self.y[1]).ravel()
        return z1, z2


@dataclass
class OmegaValue:
    value: complex
    tail: float
    R: int
    terms: int

    def __iter__(self):
        yield self.value
        yield self.tail


def _prefactor(k: int) -> float:
    return math.factorial(k - 1) / (2 * (2 * math.pi) ** k)


def _vectors(D: int, m, R: int, beta):
    """Numeric (a, b, nu, nu', height) arrays for the truncated lattice sum."""
    r = math.sqrt(D)
    w, wc = (D + r) / 2, (D - r) / 2
    rows = []
    if beta is ALL or beta is None:
        rows = enumerate_integral(D, Fraction(m), R)
    else:
        rows = enumerate_integral(D, Fraction(m), R, beta)
    if not rows:
        z = np.zeros(0)
        return z, z, z, z, z
    arr = np.array(rows, dtype=float)
    a, b, u, v = arr.T
    nu = (u + v * w) / r
    nuc = -(u + v * wc) / r
    h = np.max(np.abs(np.stack([a, b, nu, nuc])), axis=0)
    return a, b, nu, nuc, h


def _shell_tail(full, half, k: int):
    return np.abs(full - half) / (2 ** (k - 2) - 1)


def _check_k(k: int):
    if k < 4 or k % 2:
        raise ValueError("k must be even and at least 4")


def eval_omega(Z: PointH2, beta: Union[DiscElement, str], m, k: int, R: int = DEFAULT_R,
               D: Optional[int] = None, pole_tol: float = 1e-8) -> OmegaValue:
    """omega_{beta,m}(Z), or omega_m for beta = ALL, by summing q_Z(X)^(-k) up to height R."""
    _check_k(k)
    m = Fraction(m)
    if m >= 0:
        raise ValueError("m must be negative")
    if R < 2:
        raise ValueError("R must be at least 2 to estimate the tail")
    if D is None:
        D = getattr(getattr(beta, "group", None), "field_discriminant", None)
        if D is None:
            raise ValueError("D is required when beta is ALL")
    a, b, nu, nuc, h = _vectors(D, m, R, beta)
    z1, z2 = complex(Z.z1), complex(Z.z2)
    q = -b * z1 * z2 + nu * z1 + nuc * z2 - a
    if q.size and np.min(np.abs(q)) < pole_tol:
        raise PoleProximityError("Z is too close to the divisor T_m")
    t = q ** (-k)
    full = complex(math.fsum(t.real), math.fsum(t.imag))
    inner = h <= R / 2
    half = complex(math.fsum(t.real[inner]), math.fsum(t.imag[inner]))
    C = _prefactor(k)
    return OmegaValue(C * full, C * float(_shell_tail(full, half, k)), R, int(q.size))


@dataclass
class GridSamples:
    grid: TorusGrid
    k: int
    beta: object
    full: np.ndarray  # N x N, height <= R
    half: np.ndarray  # N x N, height <= R/2
    terms: int

    def spectra(self):
        N2 = self.grid.N ** 2
        return np.fft.fft2(self.full) / N2, np.fft.fft2(self.half) / N2


def sample_grid(grid: TorusGrid, k: int, beta=ALL, pole_tol: float = 1e-8) -> GridSamples:
    """Values of omega over the grid, in a fixed summation order."""
    _check_k(k)
    a, b, nu, nuc, h = _vectors(grid.D, grid.m, grid.R, beta)
    z1, z2 = grid.points()
    full = np.zeros(z1.shape, complex)
    half = np.zeros(z1.shape, complex)
    for i in range(0, a.size, CHUNK):
        sl = slice(i, i + CHUNK)
        q = (-b[sl, None] * z1 * z2 + nu[sl, None] * z1 + nuc[sl, None] * z2 - a[sl, None])
        if np.min(np.abs(q)) < pole_tol:
            raise PoleProximityError("grid point too close to the divisor T_m")
        t = q ** (-k)
        full += t.sum(axis=0)
        half += t[h[sl] <= grid.R / 2].sum(axis=0)
    C = _prefactor(k)
    N = grid.N
    return GridSamples(grid, k, beta, C * full.reshape(N, N), C * half.reshape(N, N), int(a.size))


@dataclass
class NumericCoefficient:
    nu: QuadRat
    value: complex
    error: float  # heuristic: shell extrapolation plus imaginary part
    index: tuple

    @property
    def real(self) -> float:
        return self.value.real

    def to_row(self) -> dict:
        return {
            "nu": str(self.nu),
            "tr_nu": self.index[0],
            "tr_nu_w": self.index[1],
            "re": repr(self.value.real),
            "im": repr(self.value.imag),
            "error_heuristic": repr(self.error),
        }


def fft_index(nu: QuadRat) -> tuple[int, int]:
    w = QuadRat.omega(nu.D)
    t1, t2 = nu.trace(), (nu * w).trace()
    if t1.denominator != 1 or t2.denominator != 1:
        raise ValueError(f"{nu} is not in the inverse different")
    return int(t1), int(t2)


def fourier_coefficient_numeric(nu: QuadRat, m, k: int, grid: TorusGrid,
                                samples: Optional[GridSamples] = None) -> NumericCoefficient:
    """c_nu recovered from a DFT of grid samples, rescaled by e^(2 pi tr(nu y))."""
    if not in_inverse_different(nu):
        raise ValueError(f"{nu} is not in the inverse different")
    if Fraction(m) != grid.m:
        raise ValueError("m does not match the grid")
    if samples is None:
        samples = sample_grid(grid, k)
    j1, j2 = fft_index(nu)
    N = grid.N
    if abs(j1) >= N // 2 or abs(j2) >= N // 2:
        raise ValueError(f"index ({j1}, {j2}) aliases on an {N}x{N} grid")
    F, Fh = samples.spectra()
    n1, n2 = nu.embeddings()
    scale = math.exp(2 * math.pi * (float(n1) * grid.y[0] + float(n2) * grid.y[1]))
    c = complex(F[j1 % N, j2 % N]) * scale
    ch = complex(Fh[j1 % N, j2 % N]) * scale
    err = float(_shell_tail(c, ch, k)) + abs(c.imag)
    return NumericCoefficient(nu, c, err, (j1, j2))


def write_csv(path, samples: GridSamples, coefficients=()) -> None:
    """Grid samples, then extracted coefficients, as two labelled CSV sections."""
    g = samples.grid
    z1, z2 = g.points()
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["# grid", f"D={g.D}", f"m={g.m}", f"k={samples.k}", f"N={g.N}", f"R={g.R}",
                     f"y1={g.y[0]!r}", f"y2={g.y[1]!r}", "tail=heuristic"])
        wr.writerow(["i", "j", "x1", "x2", "re", "im"])
        vals = samples.full.ravel()
        for idx in range(vals.size):
            i, j = divmod(idx, g.N)
            wr.writerow([i, j, repr(z1[idx].real), repr(z2[idx].real), repr(vals[idx].real), repr(vals[idx].imag)])
        if coefficients:
            wr.writerow(["# coefficients"])
            keys = list(coefficients[0].to_row())
            wr.writerow(keys)
            for c in coefficients:
                row = c.to_row()
                wr.writerow([row[k] for k in keys])
