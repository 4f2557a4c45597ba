"""Walls, Weyl chambers and the positivity condition on (y1, y2) in R_{>0}^2.

A wall of norm m < 0 is the line nu y1 + nu' y2 = 0 for nu in the inverse
different with N(nu) = m; its slope y2/y1 is -nu/nu'.  Walls come in orbits
under the totally positive unit eta = eps^2, which multiplies slopes by eta^2,
so a chamber is described locally by a window of slopes around a base point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath

from .lattice import DEFAULT_PREC, PointH2, enumerate_integral, iter_dual_box
from .quadfield import QuadRat, format_quadrat, fundamental_unit, in_inverse_different, is_totally_positive

WALL_TOL = mpmath.mpf(10) ** -30


class NotChamberConstant(ValueError):
    """The sign of tr(nu y) changes inside the chamber."""


class OnWallError(ValueError):
    """The base point lies on a wall."""


def slope(nu: QuadRat) -> QuadRat:
    return -nu / nu.conjugate()


def _norm_rep(nu: QuadRat) -> QuadRat:
    return nu if nu.sign() > 0 else -nu


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**12) if v != int(v) else Fraction(int(v))
    return Fraction(v)


def wall_representatives(m: Fraction, D: int) -> list[QuadRat]:
    """Wall vectors nu > 0 with slope in [1, eta^2), one per orbit of eta = eps^2."""
    m = Fraction(m)
    if m >= 0:
        raise ValueError("walls need m < 0")
    eta = fundamental_unit(D) ** 2
    eta_f = eta.embeddings()[0]
    bound = math.sqrt(abs(m)) * eta_f + 1
    lo, hi = QuadRat(1, 0, D), eta * eta
    reps = []
    for u, v in iter_dual_box(D, Fraction(bound).limit_denominator(1000) + 1):
        nu = QuadRat.from_dual_basis(u, v, D)
        if nu.norm() != m or nu.sign() <= 0:
            continue
        s = slope(nu)
        if lo <= s < hi:
            reps.append(nu)
    return reps


def wall_vectors(m, slope_window: Sequence, D: int) -> list[QuadRat]:
    """All nu (up to sign) with N(nu) = m and slope inside the window, sorted by slope."""
    m = Fraction(m)
    lo, hi = (_as_fraction(s) for s in slope_window)
    if lo <= 0 or hi < lo:
        raise ValueError("slope window must be a positive interval")
    reps = wall_representatives(m, D)
    if not reps:
        return []
    eta = fundamental_unit(D) ** 2
    mult = math.log(eta.embeddings()[0] ** 2)
    out = []
    for nu in reps:
        s = float(slope(nu).embeddings()[0])
        j0 = math.floor(math.log(float(lo) / s) / mult) - 1
        j1 = math.ceil(math.log(float(hi) / s) / mult) + 1
        for j in range(j0, j1 + 1):
            w = nu * eta ** j
            sw = slope(w)
            if lo <= sw <= hi:
                out.append(w)
    out.sort(key=lambda w: slope(w).embeddings(mpmath.mp)[0])
    return out


@dataclass(frozen=True)
class WeylChamber:
    D: int
    m: Fraction
    base_point: tuple
    slope_window: tuple
    walls: tuple
    signs: tuple
    lower: Optional[QuadRat] = None  # nearest wall below the base slope
    upper: Optional[QuadRat] = None  # nearest wall above

    @property
    def base_slope(self) -> Fraction:
        return self.base_point[1] / self.base_point[0]

    def trace_sign(self, nu: QuadRat) -> int:
        y1, y2 = self.base_point
        return (nu * y1 + nu.conjugate() * y2).sign()

    def chamber_id(self) -> str:
        lo = format_quadrat(self.lower) if self.lower is not None else "0"
        hi = format_quadrat(self.upper) if self.upper is not None else "inf"
        return f"({lo}) | ({hi})"

    def contains_slope(self, s: QuadRat) -> bool:
        """Is the slope s strictly inside the chamber?"""
        if self.lower is not None and s <= slope(self.lower):
            return False
        if self.upper is not None and s >= slope(self.upper):
            return False
        return True

    def to_json(self) -> dict:
        return {
            "m": str(self.m),
            "base": [str(self.base_point[0]), str(self.base_point[1])],
            "walls": [format_quadrat(w) for w in self.walls],
            "signs": list(self.signs),
        }


def chamber_of(y, m, D: int, window: Optional[Sequence] = None) -> WeylChamber:
    m = Fraction(m)
    y1, y2 = (_as_fraction(v) for v in y)
    if y1 <= 0 or y2 <= 0:
        raise ValueError("base point must have positive coordinates")
    s = y2 / y1
    lo, hi = (s / 8, s * 8) if window is None else tuple(_as_fraction(v) for v in window)
    walls = wall_vectors(m, (lo, hi), D)
    signs = []
    for w in walls:
        t = w * y1 + w.conjugate() * y2
        sg = t.sign()
        tf = abs(t.embeddings(mpmath.mp)[0]) / max(y1, y2)
        if sg == 0 or tf < WALL_TOL:
            raise OnWallError(f"base point lies on the wall of {format_quadrat(w)}")
        signs.append(sg)
    # neighbours of the base slope, widening the search window when needed
    have_walls = bool(wall_representatives(m, D))
    lower = upper = None
    a, b = lo, hi
    while have_walls:
        ws = wall_vectors(m, (a, b), D)
        below = [w for w in ws if slope(w) < s]
        above = [w for w in ws if slope(w) > s]
        if below and above:
            lower, upper = below[-1], above[0]
            break
        a, b = a / 64, b * 64
    return WeylChamber(D, m, (y1, y2), (lo, hi), tuple(walls), tuple(signs), lower, upper)


def positivity(nu: QuadRat, W: WeylChamber) -> bool:
    """(nu, W) > 0: tr(nu y) > 0 throughout the chamber."""
    if not nu:
        raise ValueError("positivity of zero")
    if not in_inverse_different(nu):
        raise ValueError(f"{nu} is not in the inverse different")
    if is_totally_positive(nu):
        return True
    if is_totally_positive(-nu):
        return False
    if W.contains_slope(slope(nu)):
        raise NotChamberConstant(f"sign of tr({format_quadrat(nu)} y) is not constant on the chamber")
    return W.trace_sign(nu) > 0


def on_divisor(Z: PointH2, m, D: int, height_bound, tol=None, prec: int = DEFAULT_PREC) -> bool:
    """Does some lambda in L' with Q(lambda) = m satisfy |b z1 z2 + nu z1 + nu' z2 + a| < tol?"""
    ctx = mpmath.mp.clone()
    ctx.prec = prec
    tol = WALL_TOL if tol is None else ctx.mpf(tol)
    z1, z2 = ctx.mpc(Z.z1), ctx.mpc(Z.z2)
    r = ctx.sqrt(D)
    for a, b, u, v in enumerate_integral(D, Fraction(m), height_bound):
        nu = QuadRat.from_dual_basis(u, v, D)
        n1 = ctx.mpf(nu.x.numerator) / nu.x.denominator + ctx.mpf(nu.y.numerator) / nu.y.denominator * r
        n2 = ctx.mpf(nu.x.numerator) / nu.x.denominator - ctx.mpf(nu.y.numerator) / nu.y.denominator * r
        if abs(b * z1 * z2 + n1 * z1 + n2 * z2 + a) < tol:
            return True
    return False
