"""Small dense linear algebra over the rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

Matrix = list[list[Fraction]]


def solve_consistent(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Optional[list[Fraction]]:
    """Some solution of ``A z = b`` (free variables set to 0), or None if inconsistent."""
    m = len(A)
    n = len(A[0]) if m else 0
    rows = [[Fraction(v) for v in A[i]] + [Fraction(b[i])] for i in range(m)]
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [vi - f * vr for vi, vr in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    if any(rows[i][n] for i in range(r, m)):
        return None
    z = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        z[c] = rows[i][n]
    return z


def is_consistent(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> bool:
    if not A:
        return True
    return solve_consistent(A, b) is not None


def ldl_psd(G: Sequence[Sequence[Fraction]]) -> Optional[list[tuple[Fraction, list[Fraction]]]]:
    """Decompose a rational symmetric matrix as ``sum d_k v_k v_k^T`` with d_k > 0.

    Symmetric Gaussian elimination with diagonal pivoting (largest remaining
    diagonal first).  Returns None when the matrix is not positive
    semidefinite: a negative pivot, or a zero diagonal whose row is not zero.
    """
    n = len(G)
    S = [[Fraction(v) for v in row] for row in G]
    for i in range(n):
        for j in range(i):
            if S[i][j] != S[j][i]:
                raise ValueError("matrix is not symmetric")
    active = list(range(n))
    out: list[tuple[Fraction, list[Fraction]]] = []
    while active:
        p = max(active, key=lambda i: S[i][i])
        d = S[p][p]
        if d < 0:
            return None
        if d == 0:
            # every remaining diagonal is zero: the rest must vanish
            if any(S[i][j] for i in active for j in active):
                return None
            break
        v = [Fraction(0)] * n
        for i in active:
            v[i] = S[i][p] / d
        out.append((d, v))
        active.remove(p)
        for i in active:
            if not v[i]:
                continue
            for j in active:
                S[i][j] -= d * v[i] * v[j]
    return out


def reassemble(parts: Sequence[tuple[Fraction, Sequence[Fraction]]], n: int) -> Matrix:
    M = [[Fraction(0)] * n for _ in range(n)]
    for d, v in parts:
        for i in range(n):
            if v[i]:
                for j in range(n):
                    M[i][j] += d * v[i] * v[j]
    return M
