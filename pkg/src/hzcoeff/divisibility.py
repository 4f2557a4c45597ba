"""Divisibility certificates for coefficients c_nu, denominator search and
integer factorization.

The modulus attached to nu = l * nu0 (nu0 primitive in the inverse different)
is M = |D l N(nu0)|^(k-1).  D l N(nu0) is always a nonzero integer; its sign
plays no role in divisibility.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .quadfield import QuadRat, format_quadrat, in_inverse_different, primitive_part

NOT_FOUND = None
DEFAULT_DELTA_BOUND = 10**6
TABLE_COLUMNS = ("nu", "l_nu", "modulus", "modulus_factored", "N_nu", "c_nu", "c_nu_factored")


# factorization

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin; deterministic for n < 3.3e24 with these bases."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int, rng: random.Random) -> int:
    """A nontrivial factor of the odd composite n (Brent's variant)."""
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


@dataclass(frozen=True)
class Factorization:
    sign: int
    factors: tuple  # ((p, e), ...) ascending

    def value(self) -> int:
        v = self.sign
        for p, e in self.factors:
            v *= p ** e
        return v

    def __iter__(self):
        return iter(self.factors)

    def __str__(self) -> str:
        parts = [f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors]
        if self.sign < 0:
            parts.insert(0, "-1")
        if not parts:
            return "1" if self.sign > 0 else "0"
        return " * ".join(parts)


def factorize(n: int) -> Factorization:
    """Factor n by trial division up to 10^4 and Pollard rho beyond."""
    n = int(n)
    if n == 0:
        return Factorization(0, ())
    sign = -1 if n < 0 else 1
    n = abs(n)
    counts: dict = {}
    for p in range(2, 10_000):
        if p * p > n:
            break
        while n % p == 0:
            counts[p] = counts.get(p, 0) + 1
            n //= p
    rng = random.Random(0)
    stack = [n] if n > 1 else []
    while stack:
        x = stack.pop()
        if is_probable_prime(x):
            counts[x] = counts.get(x, 0) + 1
            continue
        r = math.isqrt(x)
        if r * r == x:
            stack += [r, r]
            continue
        d = _pollard_rho(x, rng)
        stack += [d, x // d]
    return Factorization(sign, tuple(sorted(counts.items())))


# certificates

@dataclass(frozen=True)
class Certificate:
    nu: QuadRat
    nu0: QuadRat
    ell: int
    modulus: int
    value: int
    quotient: Fraction
    ok: bool
    factorization: Factorization

    def to_json(self) -> dict:
        return {
            "nu": format_quadrat(self.nu),
            "nu0": format_quadrat(self.nu0),
            "l_nu": self.ell,
            "modulus": self.modulus,
            "value": self.value,
            "quotient": str(self.quotient),
            "ok": self.ok,
            "factored": str(self.factorization),
        }


def modulus(nu: QuadRat, k: int) -> tuple[QuadRat, int, int]:
    """(nu0, l, |D l N(nu0)|^(k-1))."""
    if not nu or not in_inverse_different(nu):
        raise ValueError(f"{nu} is not a nonzero element of the inverse different")
    nu0, ell = primitive_part(nu)
    base = nu.D * ell * nu0.norm()
    if base.denominator != 1:
        raise ArithmeticError("D l N(nu0) should be an integer")
    return nu0, ell, abs(int(base)) ** (k - 1)


def certificate(nu: QuadRat, value: int, D: int, k: int) -> Certificate:
    if nu.D != D:
        raise ValueError("nu lives in a different field")
    if isinstance(value, Fraction) and value.denominator != 1:
        raise ValueError("certificate needs an integral value")
    value = int(value)
    nu0, ell, M = modulus(nu, k)
    return Certificate(nu, nu0, ell, M, value, Fraction(value, M), value % M == 0, factorize(value))


def denominator_search(values: Iterable, bound: int = DEFAULT_DELTA_BOUND) -> Optional[int]:
    """Least delta <= bound with delta * v integral for every v, else NOT_FOUND."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    delta = 1
    for v in values:
        delta = math.lcm(delta, Fraction(v).denominator)
        if delta > bound:
            return NOT_FOUND
    return delta


def divisibility_delta(pairs: Sequence, D: int, k: int, bound: int = DEFAULT_DELTA_BOUND) -> Optional[int]:
    """Least delta <= bound such that every delta * c_nu is an integer divisible by its modulus.

    pairs holds (nu, c_nu) with c_nu rational.  This is an empirical search
    for the nu-independent integer in the divisibility statement.
    """
    base = denominator_search([c for _, c in pairs], bound)
    if base is NOT_FOUND:
        return NOT_FOUND
    need = 1
    for nu, c in pairs:
        _, _, M = modulus(nu, k)
        v = Fraction(c) * base
        # smallest t with t * v = 0 mod M
        need = math.lcm(need, M // math.gcd(int(v), M))
    delta = base * need
    return delta if delta <= bound else NOT_FOUND


# table emitter

def table_row(nu: QuadRat, value: int, k: int) -> dict:
    cert = certificate(nu, value, nu.D, k)
    return {
        "nu": format_quadrat(nu),
        "l_nu": cert.ell,
        "modulus": cert.modulus,
        "modulus_factored": str(factorize(cert.modulus)),
        "N_nu": str(nu.norm()),
        "c_nu": cert.value,
        "c_nu_factored": str(cert.factorization),
    }


def emit_table(rows: Sequence[dict], fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        wr = csv.DictWriter(buf, fieldnames=list(TABLE_COLUMNS), lineterminator="\n", extrasaction="ignore")
        wr.writeheader()
        for r in rows:
            wr.writerow(r)
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([{c: r[c] for c in TABLE_COLUMNS} for r in rows], indent=2) + "\n"
    if fmt == "text":
        cols = list(TABLE_COLUMNS)
        cells = [cols] + [[str(r[c]) for c in cols] for r in rows]
        widths = [max(len(row[i]) for row in cells) for i in range(len(cols))]
        return "\n".join("  ".join(s.ljust(w) for s, w in zip(row, widths)).rstrip() for row in cells) + "\n"
    raise ValueError(f"unknown format {fmt!r}")
