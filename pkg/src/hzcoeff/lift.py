"""Coefficients of the theta lift of a formal weight k expansion.

The lift of F is computed on the normalized side C * Phi(F, Z) with
C = sqrt(2)^(2-k) i^k, so everything stays rational:

    constant term      -c_F(0, 0) B_k / k
    coefficient at nu   2 * sum_{d | nu} d^(k-1) c_F(lambda(nu/d), N(nu)/d^2)

for nu with (nu, W) > 0, where d | nu means nu/d lies in the inverse
different and lambda(nu) is the class of nu in L'/L.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .lattice import coset_of_nu
from .qexp import VVQExpansion
from .quadfield import QuadRat, format_quadrat, in_inverse_different, primitive_part
from .weyl import NotChamberConstant, WeylChamber, positivity


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """B_k from sum_{j<=n} C(n+1, j) B_j = 0, so B_1 = -1/2."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return Fraction(1)
    if k > 1 and k % 2:
        return Fraction(0)
    return -sum((math.comb(k + 1, j) * bernoulli(j) for j in range(k)), Fraction(0)) / (k + 1)


@dataclass
class LiftExpansion:
    D: int
    k: int
    constant: Fraction
    coefficients: dict = field(default_factory=dict)  # QuadRat -> Fraction
    chamber_id: str = ""

    def coefficient(self, nu: QuadRat) -> Fraction:
        return self.coefficients.get(nu, Fraction(0))

    def to_json(self) -> str:
        rows = sorted(self.coefficients.items(), key=lambda kv: (kv[0].trace(), kv[0].x, kv[0].y))
        obj = {
            "D": self.D,
            "k": self.k,
            "chamber": self.chamber_id,
            "normalization": "C*Phi(F,Z), C = sqrt(2)^(2-k) i^k",
            "constant": str(self.constant),
            "coefficients": [{"nu": format_quadrat(nu), "exact": str(c)} for nu, c in rows],
        }
        return json.dumps(obj, sort_keys=True)


def _divisor_sum(F: VVQExpansion, nu: QuadRat, k: int) -> Fraction:
    _, ell = primitive_part(nu)
    N = nu.norm()
    total = Fraction(0)
    for d in range(1, ell + 1):
        if ell % d:
            continue
        gamma = F.group.element(coset_of_nu(nu / d).coords)
        total += Fraction(d) ** (k - 1) * F.coefficient(gamma, N / (d * d))
    return 2 * total


def _positive(nu: QuadRat, chamber: WeylChamber) -> bool:
    try:
        return positivity(nu, chamber)
    except NotChamberConstant:
        return False


def lift_coefficients(F: VVQExpansion, chamber: WeylChamber, targets: Iterable[QuadRat]) -> LiftExpansion:
    """Exact lift coefficients at each target nu; targets outside the support are omitted."""
    k = F.weight
    if k.denominator != 1 or k < 2 or int(k) % 2:
        raise ValueError(f"lift input must have even integral weight, got {k}")
    if F.dual:
        raise ValueError("lift input must transform with the Weil representation, not its dual")
    k = int(k)
    D = chamber.D
    const = -F.coefficient(F.group.zero(), 0) * bernoulli(k) / k
    out = LiftExpansion(D, k, const, chamber_id=chamber.chamber_id())
    for nu in targets:
        if nu.D != D:
            raise ValueError("target lives in a different field")
        if not nu or not in_inverse_different(nu):
            raise ValueError(f"{nu} is not a nonzero element of the inverse different")
        if _positive(nu, chamber):
            out.coefficients[nu] = _divisor_sum(F, nu, k)
    return out
