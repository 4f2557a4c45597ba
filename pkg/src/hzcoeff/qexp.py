"""Formal vector-valued q-expansions with exact rational coefficients.

An expansion is a finite map (gamma, n) -> c standing for
sum c * e_gamma(n tau), where gamma runs over a discriminant group and
n = Q(gamma) mod 1 (or -Q(gamma) mod 1 for the dual representation).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import mpmath

from .weilrep import DiscElement, DiscriminantGroup


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True, eq=False)
class VVQExpansion:
    group: DiscriminantGroup
    weight: Fraction
    dual: bool
    terms: Mapping

    def __init__(self, group: DiscriminantGroup, weight, terms=(), dual: bool = False):
        items = terms.items() if isinstance(terms, Mapping) else terms
        store: dict = {}
        for key, c in items:
            gamma, n = key
            if not isinstance(gamma, DiscElement):
                gamma = group.elements()[int(gamma)]
            elif gamma.group is not group:
                gamma = group.element(gamma.coords)
            n, c = _frac(n), _frac(c)
            q = group.Q(gamma)
            target = -q if dual else q
            if (n - target).denominator != 1:
                raise ValueError(f"n = {n} is not congruent to {'-' if dual else ''}Q(gamma) = {q} mod 1")
            if c:
                store[(gamma, n)] = store.get((gamma, n), Fraction(0)) + c
                if not store[(gamma, n)]:
                    del store[(gamma, n)]
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "weight", _frac(weight))
        object.__setattr__(self, "dual", bool(dual))
        object.__setattr__(self, "terms", MappingProxyType(store))

    def __eq__(self, other) -> bool:
        if not isinstance(other, VVQExpansion):
            return NotImplemented
        return (self.group is other.group and self.weight == other.weight
                and self.dual == other.dual and dict(self.terms) == dict(other.terms))

    def __hash__(self):
        return hash((self.weight, self.dual, frozenset(self.terms.items())))

    def coefficient(self, gamma: DiscElement, n) -> Fraction:
        return self.terms.get((gamma, _frac(n)), Fraction(0))

    def _like(self, terms, weight=None) -> "VVQExpansion":
        return VVQExpansion(self.group, self.weight if weight is None else weight, terms, self.dual)

    def principal_part(self) -> "VVQExpansion":
        return self._like({key: c for key, c in self.terms.items() if key[1] < 0})

    def regular_part(self) -> "VVQExpansion":
        return self._like({key: c for key, c in self.terms.items() if key[1] >= 0})

    def min_exponent(self):
        return min((n for _, n in self.terms), default=None)

    def is_zero(self) -> bool:
        return not self.terms

    def _check_compatible(self, other: "VVQExpansion"):
        if other.group is not self.group:
            raise ValueError("expansions live on different discriminant groups")
        if other.weight != self.weight or other.dual != self.dual:
            raise ValueError("weight or representation mismatch")

    def __add__(self, other: "VVQExpansion") -> "VVQExpansion":
        self._check_compatible(other)
        return self._like(list(self.terms.items()) + list(other.terms.items()))

    def __neg__(self) -> "VVQExpansion":
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "VVQExpansion":
        c = _frac(c)
        return self._like({key: c * v for key, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: (kv[0][0].index, kv[0][1]))

    def to_json(self) -> str:
        obj = {
            "weight": str(self.weight),
            "dual": self.dual,
            "terms": [{"gamma": g.index, "n": str(n), "c": str(c)} for (g, n), c in self.sorted_terms()],
        }
        return json.dumps(obj, sort_keys=True)

    @classmethod
    def from_json(cls, text, group: DiscriminantGroup) -> "VVQExpansion":
        obj = json.loads(text) if isinstance(text, str) else text
        terms = [((int(t["gamma"]), Fraction(t["n"])), Fraction(t["c"])) for t in obj["terms"]]
        return cls(group, Fraction(obj["weight"]), terms, bool(obj.get("dual", False)))


def zero_expansion(group: DiscriminantGroup, weight, dual: bool = False) -> VVQExpansion:
    return VVQExpansion(group, weight, {}, dual)


def bol(f: VVQExpansion, k: int) -> VVQExpansion:
    """Apply D^(k-1): weight 2-k to weight k, c(gamma, n) -> n^(k-1) c(gamma, n)."""
    if k < 2:
        raise ValueError("the Bol operator needs k >= 2")
    if f.weight != 2 - k:
        raise ValueError(f"expected weight {2 - k}, got {f.weight}")
    terms = {(g, n): c * n ** (k - 1) for (g, n), c in f.terms.items() if n != 0}
    return f._like(terms, weight=Fraction(k))


def pairing(F: VVQExpansion, g: VVQExpansion) -> Fraction:
    """sum over gamma and n > 0 of a_g(gamma, n) a_F(gamma, -n)."""
    total = Fraction(0)
    for (gamma, n), c in g.terms.items():
        if n > 0:
            total += c * F.coefficient(gamma, -n)
    return total


def linear_combine(weights: Sequence, forms: Sequence[VVQExpansion]) -> VVQExpansion:
    if len(weights) != len(forms) or not forms:
        raise ValueError("need equally many weights and forms, at least one")
    out = forms[0].scale(weights[0])
    for w, f in zip(weights[1:], forms[1:]):
        out = out + f.scale(w)
    return out


def harmonic_profile(m, k: int, v, prec: int = 53):
    """M_{m,k}(v, k/2) = e^(-2 pi m v) / Gamma(k).

    At the harmonic point s = k/2 the Whittaker profile of the weight 2-k
    Poincare series collapses to this elementary function, so the only data
    of F_{beta,m} that survive are its principal part and the holomorphic
    coefficients c^+(gamma, n); this is what justifies working with formal
    expansions here.
    """
    ctx = mpmath.mp.clone()
    ctx.prec = prec
    m = _frac(m)
    return ctx.exp(-2 * ctx.pi * ctx.mpf(m.numerator) / m.denominator * ctx.mpf(v)) / ctx.gamma(k)


def from_terms(group: DiscriminantGroup, weight, triples: Iterable, dual: bool = False) -> VVQExpansion:
    """Build from (gamma, n, c) triples."""
    return VVQExpansion(group, weight, [((g, n), c) for g, n, c in triples], dual)
