"""The even lattice L of signature (2,2) attached to a real quadratic field.

L consists of the matrices X = (a nu'; nu b) with a, b in Z and nu in O_F, with
Q(X) = -det(X) = N(nu) - ab.  Its dual L' has nu in the inverse different and
L'/L is isomorphic to (inverse different)/O_F.

Coordinates of a vector in the lattice basis are (a, b, s, t) where
nu = s + t*w and w = (D + sqrt(D))/2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import mpmath

from .quadfield import QuadRat, format_quadrat, in_inverse_different, parse_quadrat, validate_discriminant
from .weilrep import DiscElement, DiscriminantGroup

DEFAULT_PREC = 128


@dataclass(frozen=True)
class LatticeVector:
    a: int
    b: int
    nu: QuadRat

    @property
    def D(self) -> int:
        return self.nu.D

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        return LatticeVector(self.a + other.a, self.b + other.b, self.nu + other.nu)

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(-self.a, -self.b, -self.nu)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int) -> "LatticeVector":
        return LatticeVector(c * self.a, c * self.b, c * self.nu)

    def matrix(self) -> tuple:
        """Rows of (a nu'; nu b) as QuadRat entries."""
        D = self.D
        return ((QuadRat(self.a, 0, D), self.nu.conjugate()), (self.nu, QuadRat(self.b, 0, D)))

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "nu": format_quadrat(self.nu)}

    @classmethod
    def from_json(cls, obj, D: int) -> "LatticeVector":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(int(obj["a"]), int(obj["b"]), parse_quadrat(obj["nu"], D))


@dataclass(frozen=True)
class PointH2:
    z1: mpmath.mpc
    z2: mpmath.mpc

    def __init__(self, z1, z2):
        z1, z2 = mpmath.mpc(z1), mpmath.mpc(z2)
        if z1.imag <= 0 or z2.imag <= 0:
            raise ValueError("point is not in the product of upper half-planes")
        object.__setattr__(self, "z1", z1)
        object.__setattr__(self, "z2", z2)

    @property
    def y(self):
        return self.z1.imag, self.z2.imag


def gram_matrix(D: int) -> list[list[int]]:
    """Gram matrix of (X, Y) = Q(X+Y) - Q(X) - Q(Y) in the basis e_a, e_b, e_1, e_w."""
    D = validate_discriminant(D)
    return [[0, -1, 0, 0], [-1, 0, 0, 0], [0, 0, 2, D], [0, 0, D, (D * D - D) // 2]]


@lru_cache(maxsize=None)
def lattice_group(D: int) -> DiscriminantGroup:
    G = DiscriminantGroup(gram_matrix(D))
    G.field_discriminant = D
    return G


def lattice_coords(X: LatticeVector) -> list[Fraction]:
    s, t = X.nu.integral_coords()
    return [Fraction(X.a), Fraction(X.b), s, t]


def quadratic_form(X: LatticeVector) -> Fraction:
    return X.nu.norm() - X.a * X.b


def bilinear(X: LatticeVector, Y: LatticeVector) -> Fraction:
    return (X.nu * Y.nu.conjugate()).trace() - X.a * Y.b - X.b * Y.a


def _ctx(prec: int):
    ctx = mpmath.mp.clone()
    ctx.prec = prec
    return ctx


def q_Z_matrix(Z: PointH2, X, prec: int = DEFAULT_PREC):
    """(X, M(Z)) for a general 2x2 matrix X = ((x11, x12), (x21, x22)).

    With M(Z) = (z1 z2, z1; z2, 1) this is -x11 + x12 z2 + x21 z1 - x22 z1 z2.
    """
    ctx = _ctx(prec)
    z1, z2 = ctx.mpc(Z.z1), ctx.mpc(Z.z2)
    (x11, x12), (x21, x22) = X
    return -x11 + x12 * z2 + x21 * z1 - x22 * z1 * z2


def _numeric_matrix(X: LatticeVector, ctx):
    nu, nuc = X.nu.embeddings(ctx)
    return ((ctx.mpf(X.a), nuc), (nu, ctx.mpf(X.b)))


def q_Z(Z: PointH2, X: LatticeVector, prec: int = DEFAULT_PREC):
    """q_Z(X) = -b z1 z2 + nu z1 + nu' z2 - a."""
    ctx = _ctx(prec)
    return q_Z_matrix(Z, _numeric_matrix(X, ctx), prec)


def q_Z_perp(Z: PointH2, X, prec: int = DEFAULT_PREC):
    """(X, M(Z)^perp) with M(Z)^perp = (conj(z1) z2, conj(z1); z2, 1)."""
    ctx = _ctx(prec)
    if isinstance(X, LatticeVector):
        X = _numeric_matrix(X, ctx)
    (x11, x12), (x21, x22) = X
    z1b, z2 = ctx.conj(ctx.mpc(Z.z1)), ctx.mpc(Z.z2)
    return -x11 + x12 * z2 + x21 * z1b - x22 * z1b * z2


def projection_norms(Z: PointH2, X, prec: int = DEFAULT_PREC):
    """(Q(X_Z), Q(X_Z^perp)) for the positive plane spanned by Re, Im of M(Z).

    Both pieces are computed from their own pairings, so Q_pos + Q_neg = Q(X)
    is a genuine identity check rather than a definition.
    """
    ctx = _ctx(prec)
    if isinstance(X, LatticeVector):
        X = _numeric_matrix(X, ctx)
    y1, y2 = ctx.mpf(Z.z1.imag), ctx.mpf(Z.z2.imag)
    q = q_Z_matrix(Z, X, prec)
    qp = q_Z_perp(Z, X, prec)
    return abs(q) ** 2 / (4 * y1 * y2), -abs(qp) ** 2 / (4 * y1 * y2)


def numeric_Q(X, prec: int = DEFAULT_PREC):
    """-det of a numeric 2x2 matrix."""
    (x11, x12), (x21, x22) = X
    return x12 * x21 - x11 * x22


def act(gamma1, gamma2, X, prec: int = DEFAULT_PREC):
    """gamma1 * X * gamma2^t for integer matrices gamma_i and a 2x2 matrix X."""
    ctx = _ctx(prec)
    if isinstance(X, LatticeVector):
        X = _numeric_matrix(X, ctx)
    A = ctx.matrix([[gamma1[0][0], gamma1[0][1]], [gamma1[1][0], gamma1[1][1]]])
    B = ctx.matrix([[gamma2[0][0], gamma2[1][0]], [gamma2[0][1], gamma2[1][1]]])
    M = A * ctx.matrix([[X[0][0], X[0][1]], [X[1][0], X[1][1]]]) * B
    return ((M[0, 0], M[0, 1]), (M[1, 0], M[1, 1]))


def sl2_inverse(g):
    (a, b), (c, d) = g
    if a * d - b * c != 1:
        raise ValueError("matrix is not in SL2(Z)")
    return ((d, -b), (-c, a))


def moebius(g, z):
    (a, b), (c, d) = g
    return (a * z + b) / (c * z + d)


def coset_of(X: LatticeVector) -> DiscElement:
    if not in_inverse_different(X.nu):
        raise ValueError(f"{X.nu} is not in the inverse different")
    return lattice_group(X.D).from_lattice_coords(lattice_coords(X))


def coset_of_nu(nu: QuadRat) -> DiscElement:
    return coset_of(LatticeVector(0, 0, nu))


@lru_cache(maxsize=None)
def _coset_table(D: int) -> dict:
    """Map (u mod D, v mod D) -> coset of (u + v w)/sqrt(D)."""
    G = lattice_group(D)
    out = {}
    for u in range(D):
        for v in range(D):
            out[(u, v)] = G.from_lattice_coords(
                [0, 0, *QuadRat.from_dual_basis(u, v, D).integral_coords()]
            )
    return out


def coset_of_dual_coords(D: int, u: int, v: int) -> DiscElement:
    return _coset_table(D)[(u % D, v % D)]


def _norm_times_D(D: int, u: int, v: int) -> int:
    """D * N((u + v w)/sqrt(D)) = -N(u + v w)."""
    return -(u * u + D * u * v + (D * D - D) // 4 * v * v)


def iter_dual_box(D: int, bound) -> Iterator[tuple[int, int]]:
    """All (u, v) with nu = (u + v w)/sqrt(D) having both embeddings in [-bound, bound].

    Here tr(nu) = v and nu - nu' = (2u + vD)/sqrt(D).
    """
    B = Fraction(bound)
    vmax = math.floor(2 * B)
    r = math.sqrt(D)
    for v in range(-vmax, vmax + 1):
        w = 2 * B - abs(v)  # |nu - nu'| <= w
        lo = math.floor((-float(w) * r - v * D) / 2) - 1
        hi = math.ceil((float(w) * r - v * D) / 2) + 1
        lim = D * w * w
        for u in range(lo, hi + 1):
            if (2 * u + v * D) ** 2 <= lim:
                yield u, v


def enumerate_integral(D: int, m: Fraction, bound, beta: Optional[DiscElement] = None):
    """Tuples (a, b, u, v) for vectors of norm m in the height box, sorted lexicographically."""
    m = Fraction(m)
    B = Fraction(bound)
    R = math.floor(B)
    out = []
    for u, v in iter_dual_box(D, B):
        if beta is not None and coset_of_dual_coords(D, u, v) != beta:
            continue
        num = _norm_times_D(D, u, v)  # D*N(nu)
        t = Fraction(num, D) - m  # = a*b
        if t.denominator != 1:
            continue
        t = int(t)
        if t == 0:
            for a in range(-R, R + 1):
                out.append((a, 0, u, v))
                if a != 0:
                    out.append((0, a, u, v))
            continue
        at = abs(t)
        for a in range(1, min(R, at) + 1):
            if at % a == 0:
                b = t // a
                if abs(b) <= R:
                    out.append((a, b, u, v))
                    out.append((-a, -b, u, v))
    out.sort()
    return out


def enumerate_vectors(beta: Optional[DiscElement], m, height_bound, D: Optional[int] = None) -> list[LatticeVector]:
    """All X in L + beta with Q(X) = m and height at most height_bound.

    beta=None means all of L'.  The height is max(|a|, |b|, |nu|, |nu'|).
    """
    m = Fraction(m)
    if beta is not None:
        G = beta.group
        if D is None:
            D = getattr(G, "field_discriminant", None)
        if (G.Q(beta) - m).denominator != 1:
            raise ValueError("m is not congruent to Q(beta) mod 1")
    if D is None:
        raise ValueError("D is required when beta is None")
    if height_bound <= 0:
        raise ValueError("height bound must be positive")
    return [
        LatticeVector(a, b, QuadRat.from_dual_basis(u, v, D))
        for a, b, u, v in enumerate_integral(D, m, height_bound, beta)
    ]
