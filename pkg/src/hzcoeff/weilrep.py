"""Discriminant groups L'/L and the Weil representation on their group ring.

A discriminant group is built from an even Gram matrix through its Smith
normal form, so non-cyclic groups (for instance D = 8) are handled the same
way as cyclic ones.  Matrices of rho(S), rho(T) are evaluated with mpmath.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

DEFAULT_PREC = 128


def smith_normal_form(A: Sequence[Sequence[int]]):
    """Return (U, S, V) with U*A*V = S diagonal, U and V unimodular, s_i | s_{i+1}."""
    M = [list(map(int, row)) for row in A]
    n, k = len(M), len(M[0])
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(k)] for i in range(k)]

    def swap_rows(i, j):
        M[i], M[j] = M[j], M[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for R in (M, V):
            for row in R:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):  # row_dst += c * row_src
        M[dst] = [x + c * y for x, y in zip(M[dst], M[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, c):
        for R in (M, V):
            for row in R:
                row[dst] += c * row[src]

    for t in range(min(n, k)):
        while True:
            entries = [(abs(M[i][j]), i, j) for i in range(t, n) for j in range(t, k) if M[i][j]]
            if not entries:
                break
            _, i, j = min(entries)
            swap_rows(t, i)
            swap_cols(t, j)
            p = M[t][t]
            dirty = False
            for i in range(t + 1, n):
                q = M[i][t] // p
                add_row(i, t, -q)
                dirty |= M[i][t] != 0
            for j in range(t + 1, k):
                q = M[t][j] // p
                add_col(j, t, -q)
                dirty |= M[t][j] != 0
            if dirty:
                continue
            bad = [(i, j) for i in range(t + 1, n) for j in range(t + 1, k) if M[i][j] % p]
            if bad:
                add_row(t, bad[0][0], 1)
                continue
            break
        if M[t][t] < 0:
            M[t] = [-x for x in M[t]]
            U[t] = [-x for x in U[t]]
    return U, M, V


def _e(ctx, r: Fraction):
    """exp(2 pi i r) for rational r."""
    r = r - (r.numerator // r.denominator)
    return ctx.expjpi(2 * ctx.mpf(r.numerator) / r.denominator)


@dataclass(frozen=True)
class DiscElement:
    coords: tuple
    group: "DiscriminantGroup" = field(compare=False, repr=False, hash=False)

    def __add__(self, other: "DiscElement") -> "DiscElement":
        return self.group.add(self, other)

    def __neg__(self) -> "DiscElement":
        return self.group.neg(self)

    def __sub__(self, other):
        return self + (-other)

    @property
    def index(self) -> int:
        return self.group.index(self)

    def is_zero(self) -> bool:
        return not any(self.coords)


class DiscriminantGroup:
    """L'/L for an even lattice given by its Gram matrix, with Q mod 1."""

    def __init__(self, gram: Sequence[Sequence[int]]):
        G = [list(map(int, r)) for r in gram]
        n = len(G)
        if any(len(r) != n for r in G) or any(G[i][j] != G[j][i] for i in range(n) for j in range(n)):
            raise ValueError("Gram matrix must be square and symmetric")
        if any(G[i][i] % 2 for i in range(n)):
            raise ValueError("Gram matrix must have even diagonal")
        if _int_det(G) == 0:
            raise ValueError("Gram matrix is singular")
        self.gram = tuple(tuple(r) for r in G)
        U, S, V = smith_normal_form(G)
        self._U = U
        self._V = V
        diag = [S[i][i] for i in range(n)]
        self._slots = [i for i in range(n) if diag[i] > 1]
        self.orders = tuple(diag[i] for i in self._slots)
        # generators in lattice coordinates: V e_i / s_i
        self.generators = tuple(
            tuple(Fraction(V[r][i], diag[i]) for r in range(n)) for i in self._slots
        )
        ev = np.linalg.eigvalsh(np.array(G, dtype=float))
        self.signature_pair = (int((ev > 0).sum()), int((ev < 0).sum()))
        self._elements = [DiscElement(c, self) for c in itertools.product(*(range(s) for s in self.orders))]
        self._index = {e.coords: i for i, e in enumerate(self._elements)}

    def __len__(self):
        return len(self._elements)

    @property
    def order(self) -> int:
        return len(self._elements)

    def elements(self) -> list[DiscElement]:
        return list(self._elements)

    def element(self, coords) -> DiscElement:
        coords = tuple(int(c) % s for c, s in zip(coords, self.orders))
        return DiscElement(coords, self)

    def zero(self) -> DiscElement:
        return self._elements[0]

    def index(self, e: DiscElement) -> int:
        return self._index[e.coords]

    def add(self, a: DiscElement, b: DiscElement) -> DiscElement:
        return self.element(x + y for x, y in zip(a.coords, b.coords))

    def neg(self, a: DiscElement) -> DiscElement:
        return self.element(-x for x in a.coords)

    def lattice_coords(self, e: DiscElement) -> list[Fraction]:
        n = len(self.gram)
        out = [Fraction(0)] * n
        for c, g in zip(e.coords, self.generators):
            for r in range(n):
                out[r] += c * g[r]
        return out

    def from_lattice_coords(self, x: Sequence) -> DiscElement:
        """Class of a dual-lattice vector given in coordinates of the lattice basis."""
        x = [Fraction(v) for v in x]
        y = [sum(self.gram[i][j] * x[j] for j in range(len(x))) for i in range(len(x))]
        if any(v.denominator != 1 for v in y):
            raise ValueError("vector is not in the dual lattice")
        t = [sum(self._U[i][j] * y[j] for j in range(len(y))) for i in range(len(y))]
        return self.element(int(t[i]) for i in self._slots)

    def Q(self, e: DiscElement) -> Fraction:
        x = self.lattice_coords(e)
        n = len(x)
        v = sum(x[i] * self.gram[i][j] * x[j] for i in range(n) for j in range(n)) / 2
        return v - (v.numerator // v.denominator)

    def bilinear(self, a: DiscElement, b: DiscElement) -> Fraction:
        x, y = self.lattice_coords(a), self.lattice_coords(b)
        n = len(x)
        v = sum(x[i] * self.gram[i][j] * y[j] for i in range(n) for j in range(n))
        return v - (v.numerator // v.denominator)


def _int_det(G) -> int:
    M = [[Fraction(v) for v in r] for r in G]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return int(det)


def discriminant_group(gram: Sequence[Sequence[int]]) -> DiscriminantGroup:
    return DiscriminantGroup(gram)


class GroupRingVector:
    """Complex amplitudes on the standard basis e_beta of C[L'/L]."""

    def __init__(self, group: DiscriminantGroup, amplitudes, prec: int = DEFAULT_PREC):
        self.group = group
        self.prec = prec
        ctx = mpmath.mp.clone()
        ctx.prec = prec
        self.ctx = ctx
        amps = list(amplitudes)
        if len(amps) != group.order:
            raise ValueError("amplitude vector has the wrong length")
        self.amplitudes = ctx.matrix([ctx.mpc(a) for a in amps])

    @classmethod
    def basis(cls, group: DiscriminantGroup, beta: DiscElement, prec: int = DEFAULT_PREC):
        amps = [0] * group.order
        amps[group.index(beta)] = 1
        return cls(group, amps, prec)

    def norm(self):
        return self.ctx.sqrt(sum(abs(a) ** 2 for a in self.amplitudes))

    def __getitem__(self, beta: DiscElement):
        return self.amplitudes[self.group.index(beta)]


class WeilRepresentation:
    """rho_L (or its dual) on C[L'/L], via explicit S and T matrices."""

    def __init__(self, group: DiscriminantGroup, dual: bool = False, prec: int = DEFAULT_PREC):
        self.group = group
        self.dual = dual
        self.prec = prec
        ctx = mpmath.mp.clone()
        ctx.prec = prec
        self.ctx = ctx
        self._S = self._build_S()
        self._T = self._build_T()
        self._Sinv = self._S.H  # unitary
        self._Tinv = self._T.H

    def _build_S(self):
        ctx, G = self.ctx, self.group
        els = G.elements()
        n = len(els)
        bp, bm = G.signature_pair
        # sqrt(i)^(b- - b+) / sqrt(|L'/L|)
        c = _e(ctx, Fraction(bm - bp, 8)) / ctx.sqrt(n)
        S = ctx.matrix(n, n)
        for j, beta in enumerate(els):  # column of e_beta
            for i, gamma in enumerate(els):
                S[i, j] = c * _e(ctx, -G.bilinear(beta, gamma))
        return S.conjugate() if self.dual else S

    def _build_T(self):
        ctx, G = self.ctx, self.group
        els = G.elements()
        T = ctx.matrix(len(els), len(els))
        for i, beta in enumerate(els):
            T[i, i] = _e(ctx, G.Q(beta))
        return T.conjugate() if self.dual else T

    def matrix(self, g: str):
        return {"S": self._S, "T": self._T, "S^-1": self._Sinv, "T^-1": self._Tinv}[g].copy()

    def apply_word(self, word: Sequence[str], v: GroupRingVector) -> GroupRingVector:
        """Apply the generators of word to v, leftmost first."""
        amps = v.amplitudes
        for g in word:
            amps = self.matrix(g) * amps
        out = GroupRingVector(self.group, [0] * self.group.order, self.prec)
        out.amplitudes = amps
        return out

    def to_json(self, g: str) -> str:
        M = self.matrix(g)
        rows = [[[float(M[i, j].real), float(M[i, j].imag)] for j in range(M.cols)] for i in range(M.rows)]
        return json.dumps(rows)


def rho_generator(group: DiscriminantGroup, g: str, dual: bool = False, prec: int = DEFAULT_PREC):
    if g not in ("S", "T"):
        raise ValueError("generator must be 'S' or 'T'")
    return WeilRepresentation(group, dual, prec).matrix(g)


def apply_word(group: DiscriminantGroup, word: Sequence[str], v: GroupRingVector, dual: bool = False):
    return WeilRepresentation(group, dual, v.prec).apply_word(word, v)


def max_entry_diff(A, B) -> float:
    return float(max(abs(A[i, j] - B[i, j]) for i in range(A.rows) for j in range(A.cols)))


def relations_report(group: DiscriminantGroup, prec: int = DEFAULT_PREC, dual: bool = False) -> dict:
    """Max entrywise deviations for the defining relations of rho_L."""
    W = WeilRepresentation(group, dual, prec)
    ctx = W.ctx
    S, T = W.matrix("S"), W.matrix("T")
    n = group.order
    I = ctx.eye(n)
    S2 = S * S
    ST = S * T
    # S^2 e_beta = i^(b- - b+) e_{-beta}  (conjugated for the dual)
    bp, bm = group.signature_pair
    phase = _e(ctx, Fraction(bm - bp, 4))
    if dual:
        phase = ctx.conj(phase)
    P = ctx.matrix(n, n)
    for j, beta in enumerate(group.elements()):
        P[group.index(-beta), j] = phase
    diagT = max(
        [abs(T[i, j]) for i in range(n) for j in range(n) if i != j] + [ctx.mpf(0)]
    )
    Tdiag = max(abs(T[i, i] - _e(ctx, group.Q(b) if not dual else -group.Q(b))) for i, b in enumerate(group.elements()))
    return {
        "order": n,
        "signature": list(group.signature_pair),
        "unitary_S": max_entry_diff(S * S.H, I),
        "unitary_T": max_entry_diff(T * T.H, I),
        "T_offdiagonal": float(diagT),
        "T_diagonal_eQ": float(Tdiag),
        "ST_cubed_vs_S2": max_entry_diff(ST * ST * ST, S2),
        "S4_vs_identity": max_entry_diff(S2 * S2, I),
        "S2_vs_negation": max_entry_diff(S2, P),
    }
