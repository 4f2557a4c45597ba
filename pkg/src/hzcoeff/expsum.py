"""Finite exponential sums G_alpha(m, nu) for the Bessel branch of the expansion.

    G_alpha(m, nu) = sum over lam in d^-1 / alpha O_F with N(lam) = m mod alpha
                     of e(tr(nu lam') / alpha)

Everything is moved into O_F through mu = sqrt(D) lam and rho = sqrt(D) nu:
the condition becomes N(mu) = n0 (mod D alpha) with n0 = -D m, and the phase is
e(T(mu) / (D alpha)) with the integer T(mu) = -tr(rho mu').  Writing
P = sqrt(D) O_F, mu runs over O_F / alpha P.

For alpha = prod q_i (prime powers) and integers u_i with
sum u_i alpha/q_i = 1, the Chinese remainder theorem gives

    G_alpha = sum over c in O_F/P of prod_i g_{q_i}(c, u_i),
    g_q(c, u) = sum over mu in (c + P)/qP, N(mu) = n0 (mod Dq) of e(u T(mu)/(Dq)).

For p not dividing D the local factor splits once more (aq + bD = 1) into
[N(c) = n0 mod D] e(u a T(c)/D) W_q(u b) with a sum W_q over O_F/q only.
The local solution sets are built by Hensel-style lifting from q/p to q.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .quadfield import QuadRat


def _egcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def factor_prime_powers(n: int, spf) -> list[tuple[int, int, int]]:
    """[(p, e, p**e)] for n using a smallest-prime-factor table."""
    out = []
    while n > 1:
        p = int(spf[n])
        e = 0
        q = 1
        while n % p == 0:
            n //= p
            e += 1
            q *= p
        out.append((p, e, q))
    return out


def spf_table(n: int) -> np.ndarray:
    spf = np.zeros(n + 1, dtype=np.int64)
    for i in range(2, n + 1):
        if spf[i] == 0:
            spf[i::i][spf[i::i] == 0] = i
    return spf


def crt_multipliers(alpha: int, qs: list[int]) -> list[int]:
    """Integers u_i with sum u_i * alpha/q_i = 1 exactly."""
    parts = [alpha // q for q in qs]
    g, coeffs = parts[0], [1]
    for h in parts[1:]:
        g, s, t = _egcd(g, h)
        coeffs = [c * s for c in coeffs] + [t]
    assert g == 1 and sum(c * h for c, h in zip(coeffs, parts)) == 1
    return coeffs


class ExpSumTable:
    """Local data for G_alpha at fixed (D, m); reusable across nu."""

    def __init__(self, D: int, m: Fraction):
        m = Fraction(m)
        n0 = -D * m
        if n0.denominator != 1 or n0 <= 0:
            raise ValueError("m must be negative with denominator dividing D")
        self.D = D
        self.m = m
        self.n0 = int(n0)
        self.c2 = (D * D - D) // 4  # N(x + y w) = x^2 + D x y + c2 y^2
        self.bad_primes = sorted({p for p in range(2, D + 1) if D % p == 0 and _is_prime(p)})
        # HNF of P = sqrt(D) O_F: rows (f, 0), (e, g) with f g = D
        v1, v2 = (-D, 2), (D * (1 - D) // 2, D)
        g, s, t = _egcd(v1[1], v2[1])
        e = s * v1[0] + t * v2[0]
        f = D // g
        self.hnf = (f, e % f, g)
        # classes of O_F / P satisfying N(c) = n0 mod D
        self.class_reps = [(x, y) for y in range(g) for x in range(f)]
        self.good_classes = [
            i for i, (x, y) in enumerate(self.class_reps) if (self.norm(x, y) - self.n0) % D == 0
        ]
        self._good_cache: dict[int, np.ndarray] = {}
        self._bad_cache: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    # arithmetic in (x, y) coordinates of mu = x + y w
    def norm(self, x, y):
        return x * x + self.D * x * y + self.c2 * y * y

    def class_of(self, x, y):
        f, e, g = self.hnf
        j = y // g if isinstance(y, int) else np.floor_divide(y, g)
        x = x - j * e
        y = y - j * g
        return (y * f + (x % f)) if isinstance(x, int) else (y * f + np.mod(x, f))

    def class_of_nu(self, lam: QuadRat) -> int:
        u, v = lam.dual_coords()
        if u.denominator != 1 or v.denominator != 1:
            raise ValueError("element is not in the inverse different")
        return int(self.class_of(int(u), int(v)))

    def T_coeffs(self, nu: QuadRat) -> tuple[int, int]:
        """(t1, t2) with T(x + y w) = -(x t1 + y t2)."""
        r1, r2 = nu.dual_coords()
        if r1.denominator != 1 or r2.denominator != 1:
            raise ValueError(f"{nu} is not in the inverse different")
        r1, r2 = int(r1), int(r2)
        D = self.D
        return 2 * r1 + D * r2, D * r1 + r2 * (D * D - D) // 2

    # local solution sets
    def good_solutions(self, q: int) -> np.ndarray:
        """(x, y) mod q with N = n0 mod q, for q a power of a prime not dividing D."""
        if q in self._good_cache:
            return self._good_cache[q]
        p = _prime_of(q)
        if q == p:
            sols = self._good_prime_solutions(p)
        else:
            base = self.good_solutions(q // p)
            h = q // p
            t = np.arange(p, dtype=np.int64)
            tx, ty = np.meshgrid(t, t, indexing="ij")
            tx, ty = tx.ravel(), ty.ravel()
            X = (base[:, 0:1] + h * tx[None, :]).ravel() % q
            Y = (base[:, 1:2] + h * ty[None, :]).ravel() % q
            keep = (self.norm(X, Y) - self.n0) % q == 0
            sols = np.stack([X[keep], Y[keep]], axis=1)
        self._good_cache[q] = sols
        return sols

    def _good_prime_solutions(self, p: int) -> np.ndarray:
        D = self.D
        if p == 2 or p < 64:
            r = np.arange(p, dtype=np.int64)
            X, Y = np.meshgrid(r, r, indexing="ij")
            X, Y = X.ravel(), Y.ravel()
            keep = (self.norm(X, Y) - self.n0) % p == 0
            return np.stack([X[keep], Y[keep]], axis=1)
        # (2x + D y)^2 = 4 n0 + D y^2 (mod p)
        r = np.arange(p, dtype=np.int64)
        sq = r * r % p
        root = np.full(p, -1, dtype=np.int64)
        root[sq[::-1]] = r[::-1]  # smallest root of each square
        y = np.arange(p, dtype=np.int64)
        s = (4 * self.n0 + D * y * y) % p
        r0 = root[s]
        has = r0 >= 0
        inv2 = (p + 1) // 2
        ys = y[has]
        r0 = r0[has]
        xa = (r0 - D * ys) % p * inv2 % p
        xb = ((-r0) - D * ys) % p * inv2 % p
        double = r0 != 0
        X = np.concatenate([xa, xb[double]])
        Y = np.concatenate([ys, ys[double]])
        return np.stack([X, Y], axis=1)

    def bad_solutions(self, q: int):
        """(x, y, class) for mu mod qP with N(mu) = n0 mod Dq, q a power of p | D."""
        if q in self._bad_cache:
            return self._bad_cache[q]
        f, e, g = self.hnf
        if q == 1:
            reps = np.array([self.class_reps[i] for i in self.good_classes], dtype=np.int64).reshape(-1, 2)
            cls = np.array(self.good_classes, dtype=np.int64)
            out = (reps[:, 0], reps[:, 1], cls)
        else:
            p = _prime_of(q)
            h = q // p
            bx, by, bc = self.bad_solutions(h)
            # representatives of P / pP, scaled by h
            i = np.arange(p, dtype=np.int64)
            I, J = np.meshgrid(i, i, indexing="ij")
            I, J = I.ravel(), J.ravel()
            px = h * (I * f + J * e)
            py = h * (J * g)
            X = (bx[:, None] + px[None, :]).ravel()
            Y = (by[:, None] + py[None, :]).ravel()
            C = np.repeat(bc, len(px))
            keep = (self.norm(X, Y) - self.n0) % (self.D * q) == 0
            X, Y, C = X[keep], Y[keep], C[keep]
            # canonical representatives modulo qP
            j = np.floor_divide(Y, q * g)
            X = X - j * q * e
            Y = Y - j * q * g
            X = np.mod(X, q * f)
            order = np.lexsort((X, Y))
            out = (X[order], Y[order], C[order])
        self._bad_cache[q] = out
        return out

    def local_count(self, q: int) -> int:
        p = _prime_of(q)
        if p in self.bad_primes:
            return len(self.bad_solutions(q)[0])
        return len(self.good_solutions(q))

    # tail-bound data
    def bad_class_ratios(self, max_size: int = 2_000_000) -> dict[int, dict[int, float]]:
        """sup over e of n_{p^e}(c)/p^e for each bad p and class c, checked for stabilization."""
        out = {}
        for p in self.bad_primes:
            ratios = []
            q = p
            while True:
                X, Y, C = self.bad_solutions(q)
                cnt = np.bincount(C, minlength=len(self.class_reps))
                ratios.append(cnt / q)
                if len(ratios) >= 3 and np.array_equal(ratios[-1], ratios[-2]):
                    break
                if q * p > max_size:
                    raise RuntimeError(f"local densities at p={p} did not stabilize")
                q *= p
            sup = np.max(np.array(ratios), axis=0)
            out[p] = {c: float(sup[c]) for c in self.good_classes}
        return out

    def good_prime_ratio(self, p: int) -> float:
        """sup over e of r(p^e)/p^e for p not dividing D (exact recursion)."""
        v = 0
        n = self.n0
        while n % p == 0:
            n //= p
            v += 1
        best = 0.0
        for e in range(1, v + 5):
            best = max(best, self._r(p, e, self.n0) / p ** e)
        return best

    @lru_cache(maxsize=None)
    def _A(self, p: int, n: int) -> int:
        """#{mu != 0 mod p : N(mu) = n mod p}."""
        r = np.arange(p, dtype=np.int64)
        X, Y = np.meshgrid(r, r, indexing="ij")
        hit = (self.norm(X, Y) - n) % p == 0
        return int(hit.sum()) - int(n % p == 0)

    def _r(self, p: int, e: int, n: int) -> int:
        if e == 0:
            return 1
        total = p ** (e - 1) * self._A(p, n % p)
        if e == 1:
            total += int(n % p == 0)
        elif e == 2:
            total += p * p * int(n % (p * p) == 0)
        elif n % (p * p) == 0:
            total += p * p * self._r(p, e - 2, n // (p * p))
        return total

    def tail_constants(self) -> tuple[float, float, dict[int, float]]:
        """(K, H, special) with #S_alpha <= K * alpha * prod_{good p | alpha} beta_p and
        prod beta_p <= H * sigma(alpha)/alpha; special holds beta_p exceeding 1 + 1/p."""
        bad = self.bad_class_ratios()
        K = 0.0
        for c in self.good_classes:
            term = 1.0
            for p in self.bad_primes:
                term *= max(1.0, bad[p][c])
            K += term
        special = {}
        H = 1.0
        primes = set(_prime_factors(self.n0)) | {2}
        for p in sorted(primes):
            if p in self.bad_primes:
                continue
            beta = self.good_prime_ratio(p)
            if beta > 1 + 1 / p:
                special[p] = beta
                H *= beta / (1 + 1 / p)
        return K, H, special


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _prime_of(q: int) -> int:
    p = 2
    while q % p:
        p += 1
    return p


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


class NuSums:
    """G_alpha(m, nu) for one nu, optionally restricted to a set of classes of O_F/P."""

    def __init__(self, table: ExpSumTable, nu: QuadRat, classes=None):
        self.table = table
        self.nu = nu
        self.t1, self.t2 = table.T_coeffs(nu)
        self.classes = list(table.good_classes) if classes is None else [
            c for c in classes if c in table.good_classes
        ]
        D = table.D
        # T(c) mod D for each class
        self.Tc = {}
        for c in self.classes:
            x, y = table.class_reps[c]
            self.Tc[c] = self.T(x, y) % D
        self._W: dict[int, np.ndarray] = {}
        self._Wh: dict[int, np.ndarray] = {}
        self._B: dict[int, np.ndarray] = {}
        self._Bh: dict[int, np.ndarray] = {}
        self._ab: dict[int, tuple[int, int]] = {}

    def T(self, x, y):
        return -(x * self.t1 + y * self.t2)

    # good local factor
    def _good_hist(self, q: int) -> np.ndarray:
        if q not in self._Wh:
            S = self.table.good_solutions(q)
            T = self.T(S[:, 0], S[:, 1]) % q
            self._Wh[q] = np.bincount(T, minlength=q).astype(np.int64)
        return self._Wh[q]

    def W_float(self, q: int) -> np.ndarray:
        """W_q(v) for all v mod q (real, by symmetry mu -> -mu)."""
        if q not in self._W:
            h = self._good_hist(q)
            self._W[q] = np.fft.fft(h.astype(np.float64)).real  # sum h_j e(-vj/q) = W(-v) = W(v)
        return self._W[q]

    def ab(self, q: int) -> tuple[int, int]:
        if q not in self._ab:
            g, a, b = _egcd(q, self.table.D)
            self._ab[q] = (a, b)
        return self._ab[q]

    # bad local factor
    def _bad_hist(self, q: int) -> np.ndarray:
        if q not in self._Bh:
            X, Y, C = self.table.bad_solutions(q)
            M = self.table.D * q
            T = self.T(X, Y) % M
            idx = {c: i for i, c in enumerate(self.classes)}
            H = np.zeros((len(self.classes), M), dtype=np.int64)
            for c, i in idx.items():
                sel = C == c
                H[i] = np.bincount(T[sel], minlength=M)
            self._Bh[q] = H
        return self._Bh[q]

    def B_float(self, q: int) -> np.ndarray:
        """g_q(c, u) for all u mod Dq, rows indexed like self.classes."""
        if q not in self._B:
            H = self._bad_hist(q).astype(np.float64)
            # sum_j H[j] e(u j / M) = conj(fft)[u] ; computed as ifft * M
            self._B[q] = np.fft.ifft(H, axis=1) * H.shape[1]
        return self._B[q]

    def count(self, factors) -> int:
        """Number of terms #S_alpha restricted to the classes."""
        D = self.table.D
        total = 0
        good = 1
        bad = []
        for p, e, q in factors:
            if p in self.table.bad_primes:
                bad.append(q)
            else:
                good *= len(self.table.good_solutions(q))
        for i, c in enumerate(self.classes):
            t = good
            for q in bad:
                t *= int(self._bad_hist(q)[i].sum())
            total += t
        return total

    def G_float(self, alpha: int, factors) -> tuple[complex, float]:
        """Double-precision G_alpha and a rounding-error bound."""
        D = self.table.D
        if alpha == 1:
            val = sum(np.exp(2j * np.pi * self.Tc[c] / D) for c in self.classes)
            return complex(val), 1e-14 * max(1, len(self.classes))
        qs = [q for _, _, q in factors]
        us = crt_multipliers(alpha, qs)
        prefactor = 1.0
        A = 0
        bad_rows = []
        errw = 0.0
        for (p, e, q), u in zip(factors, us):
            if p in self.table.bad_primes:
                M = D * q
                bad_rows.append(self.B_float(q)[:, u % M])
                errw += 5 * math.log2(M) + 16
            else:
                a, b = self.ab(q)
                prefactor *= self.W_float(q)[(u * b) % q]
                A += u * a
                errw += 5 * math.log2(q) + 16
        total = 0j
        for i, c in enumerate(self.classes):
            t = np.exp(2j * np.pi * ((A * self.Tc[c]) % D) / D)
            for row in bad_rows:
                t *= row[i]
            total += t
        val = prefactor * total
        err = self.count(factors) * (errw + 16) * 2.0 ** -53
        return complex(val), err

    def G_mp(self, alpha: int, factors, ctx) -> "mpmath.mpc":
        """G_alpha at the precision of ctx."""
        D = self.table.D
        if alpha == 1:
            return ctx.fsum(_e(ctx, self.Tc[c], D) for c in self.classes)
        qs = [q for _, _, q in factors]
        us = crt_multipliers(alpha, qs)
        prefactor = ctx.mpf(1)
        A = 0
        bad_vals = []
        for (p, e, q), u in zip(factors, us):
            if p in self.table.bad_primes:
                M = D * q
                H = self._bad_hist(q)
                row = []
                for i in range(len(self.classes)):
                    nz = np.nonzero(H[i])[0]
                    row.append(ctx.fsum(int(H[i][j]) * _e(ctx, (u * int(j)) % M, M) for j in nz))
                bad_vals.append(row)
            else:
                a, b = self.ab(q)
                h = self._good_hist(q)
                v = (u * b) % q
                nz = np.nonzero(h)[0]
                prefactor *= ctx.fsum(int(h[j]) * ctx.cospi(ctx.mpf(2 * ((v * int(j)) % q)) / q) for j in nz)
                A += u * a
        total = ctx.mpc(0)
        for i, c in enumerate(self.classes):
            t = _e(ctx, (A * self.Tc[c]) % D, D)
            for row in bad_vals:
                t *= row[i]
            total += t
        return prefactor * total


def _e(ctx, num: int, den: int):
    return ctx.expjpi(ctx.mpf(2 * num) / den)


def G_direct(D: int, m: Fraction, nu: QuadRat, alpha: int, ctx=None, classes=None):
    """Brute-force G_alpha over lam in d^-1 / alpha O_F (reference implementation)."""
    ctx = ctx or mpmath.mp
    m = Fraction(m)
    tab = ExpSumTable(D, m)
    total = ctx.mpc(0)
    # lam = (x + y w)/sqrt(D); x, y mod alpha P via a box of D*alpha^2 points
    f, e, g = tab.hnf
    for y in range(alpha * g):
        for x in range(alpha * f):
            lam = QuadRat.from_dual_basis(x, y, D)
            if ((lam.norm() - m) / alpha).denominator != 1:
                continue
            if classes is not None and tab.class_of(x, y) not in classes:
                continue
            t = (nu * lam.conjugate()).trace() / alpha
            t -= t.numerator // t.denominator
            total += ctx.expjpi(2 * ctx.mpf(t.numerator) / t.denominator)
    return total
