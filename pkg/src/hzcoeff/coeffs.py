"""Closed-form Fourier coefficients of omega_m and omega_{beta,m}.

For k >= 4 even and m < 0 the coefficient of e(tr(nu z)) in omega_m is

  nu totally positive:
      (2 pi / sqrt(D)) (N(nu)/|m|)^((k-1)/2)
          * sum_{alpha >= 1} G_alpha(m, nu)/alpha * I_{k-1}(4 pi sqrt(N(nu)|m|) / alpha)

  otherwise:
      (-1)^(k/2) * sum of r^(k-1) over r >= 1 with nu/r in the inverse different,
      N(nu/r) = target and tr(nu y / r) > 0 on the chamber.

The divisor condition target is D*m with divisor_norm="printed" and m with
divisor_norm="alternative"; see ``DIVISOR_NORMS``.  The exponential sums
G_alpha live in :mod:`hzcoeff.expsum`.

The alpha-series is truncated at an adaptive alpha_max.  Beyond it the tail is
bounded with |G_alpha| <= K alpha prod_{p | alpha} beta_p (local solution
counts) and I_{k-1}(t) <= (t/2)^(k-1) e^(t^2/4) / (k-1)!, which reduces to a
rigorous bound for sum_{alpha > A} sigma(alpha) alpha^(-k).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import mpmath

from .expsum import ExpSumTable, NuSums, factor_prime_powers, spf_table
from .lattice import coset_of_nu
from .quadfield import QuadRat, format_quadrat, in_inverse_different, is_totally_positive, primitive_part
from .weilrep import DiscElement
from .weyl import WeylChamber, positivity

DEFAULT_PREC = 192
DEFAULT_ALPHA_CAP = 10_000
HIGH_PRECISION_ALPHA = 64  # alpha <= this use mpmath for G_alpha; beyond, numpy doubles
DIVISOR_NORMS = ("printed", "alternative")

TOTALLY_POSITIVE = "totally_positive"
DIVISOR_SUM = "divisor_sum"
ZERO_SUPPORT = "zero_support"


class CertificationError(RuntimeError):
    """The requested accuracy could not be certified."""


def _ctx(prec: int):
    ctx = mpmath.mp.clone()
    ctx.prec = prec
    return ctx


def bessel_I(order: int, x, prec: int = DEFAULT_PREC, tol=None):
    """I_order(x) from its ascending series; returns (value, remainder bound).

    Terms t_j = (x/2)^(2j+order) / (j! (j+order)!) are positive and the ratio
    t_{j+1}/t_j = (x/2)^2 / ((j+1)(j+1+order)) decreases, so once it drops
    below 1 the remainder is at most t_{j+1} / (1 - ratio).
    """
    ctx = _ctx(prec)
    x = ctx.mpf(x)
    if order < 0:
        raise ValueError("order must be >= 0")
    if x < 0:
        raise ValueError("x must be >= 0")
    if x == 0:
        return (ctx.mpf(1) if order == 0 else ctx.mpf(0)), ctx.mpf(0)
    tol = ctx.mpf(2) ** (-prec) if tol is None else ctx.mpf(tol)
    h2 = (x / 2) ** 2
    term = (x / 2) ** order / ctx.factorial(order)
    total = ctx.mpf(0)
    j = 0
    while True:
        total += term
        ratio = h2 / ((j + 1) * (j + 1 + order))
        nxt = term * ratio
        if ratio < 0.5:
            bound = nxt / (1 - ratio)
            if bound <= tol * total:
                return total, bound + total * ctx.mpf(2) ** (-prec + 8)
        term = nxt
        j += 1


@dataclass
class CoefficientResult:
    nu: QuadRat
    value: object  # Fraction for exact results, mpf midpoint otherwise
    error: object
    branch: str
    D: int
    k: int
    m: Fraction
    chamber: str = ""
    alpha_max: int = 0
    tail_bound: object = 0
    divisor_norm: str = "printed"
    notes: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)

    def integer(self) -> Optional[int]:
        """Nearest integer when the error bound certifies it, else None."""
        if self.exact:
            return int(self.value) if self.value.denominator == 1 else None
        if self.error < 0.5:
            n = int(mpmath.nint(self.value))
            if abs(self.value - n) + self.error < 0.5:
                return n
        return None

    def value_text(self, digits: int = 30) -> str:
        if self.exact:
            return str(self.value)
        n = self.integer()
        if n is not None:
            return str(n)
        return f"{mpmath.nstr(self.value, digits)} +/- {mpmath.nstr(self.error, 5)}"

    def to_json(self) -> dict:
        return {
            "nu": format_quadrat(self.nu),
            "branch": self.branch,
            "value": self.value_text(),
            "midpoint": str(self.value) if self.exact else mpmath.nstr(self.value, 40),
            "tail_alpha": self.alpha_max,
            "tail_bound": mpmath.nstr(self.tail_bound, 6) if not isinstance(self.tail_bound, int) else self.tail_bound,
            "error": mpmath.nstr(self.error, 6) if not isinstance(self.error, (int, Fraction)) else str(self.error),
            "D": self.D,
            "k": self.k,
            "m": str(self.m),
            "chamber": self.chamber,
            "divisor_norm": self.divisor_norm,
        }


@lru_cache(maxsize=None)
def _table(D: int, m: Fraction) -> ExpSumTable:
    return ExpSumTable(D, m)


@lru_cache(maxsize=None)
def _tail_constants(D: int, m: Fraction):
    return _table(D, m).tail_constants()


def _sigma_tail(k: int, A: int, ctx):
    """Upper bound for sum_{alpha > A} sigma(alpha) alpha^(-k)."""
    s = k - 1
    total = ctx.mpf(0)
    for e in range(1, A + 1):
        x = A // e
        total += ctx.mpf(e) ** (-k) * ctx.mpf(x) ** (1 - s) / (s - 1)
    total += ctx.zeta(s) * ctx.mpf(A) ** (1 - k) / (k - 1)
    return total * (1 + ctx.mpf(2) ** -40)


def _classes_for(table: ExpSumTable, beta: Optional[DiscElement], D: int):
    """Class set and normalizer for the coset-restricted sum (G^beta + G^-beta)/2."""
    if beta is None:
        return None, 1
    from .lattice import lattice_group

    G = lattice_group(D)
    lc = G.lattice_coords(beta)
    lam = QuadRat.from_integral_basis(lc[2], lc[3], D)
    c1 = table.class_of_nu(lam)
    c2 = table.class_of_nu(-lam)
    return sorted({c1, c2}), (1 if c1 == c2 else 2)


def coeff_totally_positive(
    nu: QuadRat,
    m,
    k: int,
    chamber: Optional[WeylChamber] = None,
    prec: int = DEFAULT_PREC,
    tol=Fraction(1, 4),
    alpha_cap: int = DEFAULT_ALPHA_CAP,
    beta: Optional[DiscElement] = None,
) -> CoefficientResult:
    m = Fraction(m)
    D = nu.D
    if not is_totally_positive(nu):
        raise ValueError(f"{format_quadrat(nu)} is not totally positive")
    if not in_inverse_different(nu):
        raise ValueError(f"{format_quadrat(nu)} is not in the inverse different")
    if m >= 0 or k < 4 or k % 2:
        raise ValueError("need m < 0 and k >= 4 even")
    ctx = _ctx(prec)
    table = _table(D, m)
    classes, norm_div = _classes_for(table, beta, D)
    sums = NuSums(table, nu, classes)
    N = nu.norm()
    Nf = ctx.mpf(N.numerator) / N.denominator
    am = ctx.mpf(-m.numerator) / m.denominator
    pref = 2 * ctx.pi / ctx.sqrt(D) * (Nf / am) ** (ctx.mpf(k - 1) / 2)
    x = 4 * ctx.pi * ctx.sqrt(Nf * am)
    tol = ctx.mpf(tol.numerator) / tol.denominator if isinstance(tol, Fraction) else ctx.mpf(tol)

    # tail certificate
    K, H, _ = _tail_constants(D, m)
    if classes is not None:
        K = K * len(classes) / max(1, len(table.good_classes))
        K = max(K, 1.0) if classes else 0.0
    lead = pref * K * H * (x / 2) ** (k - 1) / ctx.factorial(k - 1) / norm_div

    def tail(A):
        return lead * ctx.exp(x * x / (4 * (A + 1) ** 2)) * _sigma_tail(k, A, ctx)

    A = 32
    while tail(A) > tol / 2:
        A = int(A * 1.25) + 1
        if A > alpha_cap:
            raise CertificationError(f"alpha cap {alpha_cap} reached before the tail bound met {tol}")
    tail_bound = tail(A)

    spf = spf_table(A + 1)
    total = ctx.mpf(0)
    err = ctx.mpf(0)
    absum = ctx.mpf(0)
    imag_max = ctx.mpf(0)
    order = k - 1
    for alpha in range(1, A + 1):
        fac = factor_prime_powers(alpha, spf)
        Ival, Ierr = bessel_I(order, x / alpha, prec)
        if alpha <= HIGH_PRECISION_ALPHA:
            g = sums.G_mp(alpha, fac, ctx)
            imag_max = max(imag_max, abs(g.imag))
            g = g.real
            gerr = ctx.mpf(0)
        else:
            gc, ge = sums.G_float(alpha, fac)
            g = ctx.mpf(gc.real)
            gerr = ctx.mpf(ge)
        g = g / norm_div
        t = g / alpha
        total += t * Ival
        absum += abs(t) * Ival
        err += (gerr / norm_div / alpha) * Ival + abs(t) * Ierr
    value = pref * total
    rounding = pref * absum * A * ctx.mpf(2) ** (-prec + 8)
    error = pref * err + tail_bound + rounding
    if rounding > tol:
        raise CertificationError(f"precision {prec} bits too low for tolerance {tol}")
    return CoefficientResult(
        nu=nu,
        value=value,
        error=error,
        branch=TOTALLY_POSITIVE,
        D=D,
        k=k,
        m=m,
        chamber=chamber.chamber_id() if chamber is not None else "",
        alpha_max=A,
        tail_bound=tail_bound,
        notes={"max_imag_G": mpmath.nstr(imag_max, 3), "prec": prec},
    )


def divisor_terms(nu: QuadRat, m, k: int, chamber: WeylChamber, divisor_norm: str = "printed",
                  beta: Optional[DiscElement] = None):
    """[(r, weight)] contributing to the divisor branch."""
    if divisor_norm not in DIVISOR_NORMS:
        raise ValueError(f"divisor_norm must be one of {DIVISOR_NORMS}")
    m = Fraction(m)
    D = nu.D
    target = D * m if divisor_norm == "printed" else m
    _, ell = primitive_part(nu)
    out = []
    for r in range(1, ell + 1):
        if ell % r:
            continue
        lam = nu / r
        if lam.norm() != target:
            continue
        if not positivity(lam, chamber):
            continue
        if beta is None:
            w = Fraction(1)
        else:
            c = coset_of_nu(lam)
            w = Fraction(int(c == beta) + int(c == -beta), 2)
        if w:
            out.append((r, w))
    return out


def coeff_divisor_branch(nu: QuadRat, m, k: int, chamber: WeylChamber, divisor_norm: str = "printed",
                         beta: Optional[DiscElement] = None) -> CoefficientResult:
    m = Fraction(m)
    if is_totally_positive(nu):
        raise ValueError(f"{format_quadrat(nu)} is totally positive")
    if k % 2:
        raise ValueError("k must be even")
    terms = divisor_terms(nu, m, k, chamber, divisor_norm, beta)
    sign = -1 if (k // 2) % 2 else 1
    value = Fraction(sign) * sum((w * r ** (k - 1) for r, w in terms), Fraction(0))
    return CoefficientResult(
        nu=nu,
        value=value,
        error=Fraction(0),
        branch=DIVISOR_SUM,
        D=nu.D,
        k=k,
        m=m,
        chamber=chamber.chamber_id(),
        divisor_norm=divisor_norm,
        notes={"r": [r for r, _ in terms]},
    )


def omega_coefficient(nu: QuadRat, m, k: int, chamber: WeylChamber, prec: int = DEFAULT_PREC,
                      divisor_norm: str = "printed", beta: Optional[DiscElement] = None,
                      **kwargs) -> CoefficientResult:
    """Coefficient of e(tr(nu z)) in omega_m (or omega_{beta,m} when beta is given)."""
    if is_totally_positive(nu):
        res = coeff_totally_positive(nu, m, k, chamber, prec, beta=beta, **kwargs)
        res.divisor_norm = divisor_norm
        return res
    res = coeff_divisor_branch(nu, m, k, chamber, divisor_norm, beta)
    if not res.notes["r"] and chamber.trace_sign(nu) <= 0:
        res.branch = ZERO_SUPPORT
    return res


def combination_coefficients(G_principal: Sequence, nu: QuadRat, k: int, chamber: WeylChamber,
                             prec: int = DEFAULT_PREC, divisor_norm: str = "printed",
                             **kwargs) -> CoefficientResult:
    """sum of c * (coefficient of omega_{beta,n} at nu) over (beta, n, c) with n < 0."""
    if not G_principal:
        raise ValueError("empty principal part")
    total_exact = Fraction(0)
    total_num = None
    err = 0
    parts = []
    for beta, n, c in G_principal:
        n, c = Fraction(n), Fraction(c)
        if n >= 0:
            raise ValueError("principal part terms need n < 0")
        G = beta.group
        if (G.Q(beta) - n).denominator != 1:
            raise ValueError("n is not congruent to Q(beta) mod 1")
        r = omega_coefficient(nu, n, k, chamber, prec, divisor_norm, beta=beta, **kwargs)
        parts.append(r)
        if r.exact:
            total_exact += c * r.value
        else:
            cm = mpmath.mpf(c.numerator) / c.denominator
            total_num = (total_num or 0) + cm * r.value
            err = err + abs(cm) * r.error
    if total_num is None:
        value, error = total_exact, Fraction(0)
    else:
        value = total_num + mpmath.mpf(total_exact.numerator) / total_exact.denominator
        error = err
    first = parts[0]
    branch = first.branch if all(p.branch == first.branch for p in parts) else "mixed"
    return CoefficientResult(
        nu=nu,
        value=value,
        error=error,
        branch=branch,
        D=nu.D,
        k=k,
        m=first.m,
        chamber=chamber.chamber_id(),
        alpha_max=max(p.alpha_max for p in parts),
        tail_bound=sum((p.tail_bound for p in parts), 0),
        divisor_norm=divisor_norm,
        notes={"terms": len(parts)},
    )


def result_json(res: CoefficientResult) -> str:
    return json.dumps(res.to_json(), sort_keys=True)
