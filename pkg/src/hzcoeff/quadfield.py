"""Exact arithmetic in a real quadratic field Q(sqrt(D)).

Elements are stored over the basis {1, sqrt(D)} as pairs of Fractions.  The
ring of integers O_F has integral basis {1, w} with w = (D + sqrt(D))/2 and
the inverse different is (1/sqrt(D)) O_F.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]

RING_OF_INTEGERS = "ring_of_integers"
INVERSE_DIFFERENT = "inverse_different"


def _squarefree(n: int) -> bool:
    if n < 1:
        return False
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


def is_fundamental_discriminant(D: int) -> bool:
    if D <= 1:
        return False
    if D % 4 == 1:
        return _squarefree(D)
    if D % 4 == 0:
        d = D // 4
        return d % 4 in (2, 3) and _squarefree(d)
    return False


def validate_discriminant(D: int) -> int:
    D = int(D)
    if not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a positive fundamental discriminant")
    return D


def _sign_of(x: Fraction, y: Fraction, D: int) -> int:
    """Exact sign of x + y*sqrt(D)."""
    sx = (x > 0) - (x < 0)
    sy = (y > 0) - (y < 0)
    if sy == 0:
        return sx
    if sx == 0 or sx == sy:
        return sy
    # opposite signs: compare x^2 against D*y^2
    diff = x * x - D * y * y
    if diff == 0:
        return 0
    return sx if diff > 0 else sy


@dataclass(frozen=True)
class QuadRat:
    """x + y*sqrt(D) with rational x, y."""

    x: Fraction
    y: Fraction
    D: int

    def __init__(self, x: Rational = 0, y: Rational = 0, D: int = 5):
        object.__setattr__(self, "x", Fraction(x))
        object.__setattr__(self, "y", Fraction(y))
        object.__setattr__(self, "D", int(D))

    # construction helpers
    @classmethod
    def from_integral_basis(cls, u: Rational, v: Rational, D: int) -> "QuadRat":
        """u + v*w with w = (D + sqrt(D))/2."""
        v = Fraction(v)
        return cls(Fraction(u) + v * D / 2, v / 2, D)

    @classmethod
    def from_dual_basis(cls, u: Rational, v: Rational, D: int) -> "QuadRat":
        """(u + v*w)/sqrt(D), the coordinates of nu*sqrt(D) in the integral basis."""
        return cls.from_integral_basis(u, v, D) / cls.sqrt(D)

    @classmethod
    def sqrt(cls, D: int) -> "QuadRat":
        return cls(0, 1, D)

    @classmethod
    def omega(cls, D: int) -> "QuadRat":
        return cls(Fraction(D, 2), Fraction(1, 2), D)

    def _coerce(self, other) -> "QuadRat":
        if isinstance(other, QuadRat):
            if other.D != self.D:
                raise ValueError("mixing elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadRat(other, 0, self.D)
        return NotImplemented

    # arithmetic
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadRat(self.x + o.x, self.y + o.y, self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadRat(-self.x, -self.y, self.D)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadRat(self.x - o.x, self.y - o.y, self.D)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadRat(self.x * o.x + self.D * self.y * o.y,
                       self.x * o.y + self.y * o.x, self.D)

    __rmul__ = __mul__

    def inverse(self) -> "QuadRat":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadRat(self.x / n, -self.y / n, self.D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = QuadRat(1, 0, self.D)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __bool__(self):
        return bool(self.x) or bool(self.y)

    # field invariants
    def conjugate(self) -> "QuadRat":
        return QuadRat(self.x, -self.y, self.D)

    def norm(self) -> Fraction:
        return self.x * self.x - self.D * self.y * self.y

    def trace(self) -> Fraction:
        return 2 * self.x

    def sign(self) -> int:
        return _sign_of(self.x, self.y, self.D)

    def conj_sign(self) -> int:
        return _sign_of(self.x, -self.y, self.D)

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def is_rational(self) -> bool:
        return self.y == 0

    def integral_coords(self) -> tuple[Fraction, Fraction]:
        """Coordinates (u, v) with self = u + v*w."""
        v = 2 * self.y
        return self.x - v * self.D / 2, v

    def dual_coords(self) -> tuple[Fraction, Fraction]:
        """Coordinates of self*sqrt(D) in the integral basis."""
        return (self * QuadRat.sqrt(self.D)).integral_coords()

    def embeddings(self, ctx=None):
        """Both real embeddings as mpmath numbers (or floats when ctx is None)."""
        if ctx is None:
            r = math.sqrt(self.D)
            return (float(self.x) + float(self.y) * r, float(self.x) - float(self.y) * r)
        r = ctx.sqrt(self.D)
        x = ctx.mpf(self.x.numerator) / self.x.denominator
        y = ctx.mpf(self.y.numerator) / self.y.denominator
        return x + y * r, x - y * r

    def __str__(self):
        return format_quadrat(self)

    def __repr__(self):
        return f"QuadRat({format_quadrat(self)!r}, D={self.D})"


def conjugate(v: QuadRat) -> QuadRat:
    return v.conjugate()


def norm_and_trace(v: QuadRat) -> tuple[Fraction, Fraction]:
    return v.norm(), v.trace()


def membership(v: QuadRat, module: str) -> bool:
    if module == RING_OF_INTEGERS:
        u, w = v.integral_coords()
        return u.denominator == 1 and w.denominator == 1
    if module == INVERSE_DIFFERENT:
        u, w = v.dual_coords()
        return u.denominator == 1 and w.denominator == 1
    raise ValueError(f"unknown module {module!r}")


def in_ring_of_integers(v: QuadRat) -> bool:
    return membership(v, RING_OF_INTEGERS)


def in_inverse_different(v: QuadRat) -> bool:
    return membership(v, INVERSE_DIFFERENT)


def is_totally_positive(v: QuadRat) -> bool:
    return v.sign() > 0 and v.conj_sign() > 0


def primitive_part(nu: QuadRat) -> tuple[QuadRat, int]:
    """Split nu = l * nu0 with nu0 primitive in the inverse different and l > 0."""
    if not nu:
        raise ValueError("primitive part of zero")
    u, v = nu.dual_coords()
    if u.denominator != 1 or v.denominator != 1:
        raise ValueError(f"{nu} is not in the inverse different")
    ell = math.gcd(int(u), int(v))
    return nu / ell, ell


def fundamental_unit(D: int) -> QuadRat:
    """Smallest unit > 1 of O_F, read off the continued fraction of a reduced generator."""
    D = validate_discriminant(D)
    # theta = (P + sqrt(d))/Q generates O_F; units appear as h - k*theta' for convergents h/k
    if D % 4 == 1:
        d, P, Q = D, 1, 2
        theta_conj = QuadRat(Fraction(1, 2), Fraction(-1, 2), D)
    else:
        d, P, Q = D // 4, 0, 1
        theta_conj = QuadRat(0, Fraction(-1, 2), D)
    s = math.isqrt(d)
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    for _ in range(100_000):
        a = (P + s) // Q
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        eps = h - k * theta_conj
        if abs(eps.norm()) == 1 and eps > 1:
            return eps
        P = a * Q - P
        Q = (d - P * P) // Q
    raise RuntimeError("continued fraction did not reach a unit")


_TERM = re.compile(
    r"""\s*([+-])?\s*
    (?:
      (?P<num>\d+(?:/\d+)?)\s*(?:\*\s*(?P<s1>sqrt\(\s*\d+\s*\)))?
      |
      (?P<s2>sqrt\(\s*\d+\s*\))(?:\s*/\s*(?P<den>\d+))?
    )\s*""",
    re.VERBOSE,
)


def parse_quadrat(text: str, D: int) -> QuadRat:
    """Parse "x + y*sqrt(D)" (either order, each part optional) or "(u, v)" dual coordinates."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")") or re.fullmatch(r"-?\d+\s*,\s*-?\d+", s):
        parts = s.strip("()").split(",")
        if len(parts) != 2:
            raise ValueError(f"cannot parse {text!r}")
        return QuadRat.from_dual_basis(int(parts[0]), int(parts[1]), D)
    x = Fraction(0)
    y = Fraction(0)
    pos = 0
    seen = False
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        if not seen and m.group(1) is None and pos != 0:
            raise ValueError(f"cannot parse {text!r}")
        if seen and m.group(1) is None:
            raise ValueError(f"cannot parse {text!r}")
        root = m.group("s1") or m.group("s2")
        if root is not None and int(root[5:-1]) != D:
            raise ValueError(f"sqrt({root[5:-1]}) does not match D={D}")
        if m.group("num") is not None:
            c = Fraction(m.group("num")) * sign
            if root:
                y += c
            else:
                x += c
        else:
            y += Fraction(sign, int(m.group("den") or 1))
        seen = True
        pos = m.end()
    if not seen:
        raise ValueError(f"cannot parse {text!r}")
    return QuadRat(x, y, D)


def format_quadrat(v: QuadRat) -> str:
    if v.y == 0:
        return str(v.x)
    sign = "-" if v.y < 0 else "+"
    return f"{v.x} {sign} {abs(v.y)}*sqrt({v.D})"
