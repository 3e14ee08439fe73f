"""Smith normal form over Z, with unimodular transforms."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

IntMatrix = List[List[int]]


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ M @ V == D`` with D diagonal and ``factors`` = nonzero diagonal of D."""

    factors: tuple
    U: tuple
    V: tuple
    D: tuple

    @property
    def rank(self) -> int:
        return len(self.factors)


def _identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> IntMatrix:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(A))]


def smith_normal_form(M: Sequence[Sequence[int]]) -> SmithDecomposition:
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        if k:
            A[dst] = [a + k * b for a, b in zip(A[dst], A[src])]
            U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        if k:
            for row in A:
                row[dst] += k * row[src]
            for row in V:
                row[dst] += k * row[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nz:
            break
        _, i0, j0 = min(nz)
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            changed = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // A[t][t]))
                    if A[i][t]:
                        swap_rows(t, i)
                        changed = True
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // A[t][t]))
                    if A[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1

    factors = tuple(A[i][i] for i in range(min(m, n)) if A[i][i])
    return SmithDecomposition(factors, tuple(map(tuple, U)), tuple(map(tuple, V)), tuple(map(tuple, A)))


def integer_solve(A: Sequence[Sequence[int]], b: Sequence[int]) -> Optional[List[int]]:
    """An integer solution x of A x = b, or None when none exists."""
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0:
        return [0] * n
    snf = smith_normal_form(A)
    c = [sum(u * bb for u, bb in zip(row, b)) for row in snf.U]
    y = [0] * n
    for i in range(m):
        d = snf.D[i][i] if i < n else 0
        if d:
            if c[i] % d:
                return None
            y[i] = c[i] // d
        elif c[i]:
            return None
    return [sum(snf.V[i][j] * y[j] for j in range(n)) for i in range(n)]


def integer_homology_ranks(boundaries: Sequence[Sequence[Sequence[int]]], dims: Sequence[int]):
    """Betti numbers and torsion of an integer chain complex.

    ``boundaries[q]`` is the matrix of d_q: C_q -> C_{q-1} (None or empty for q=0).
    """
    ranks = []
    for q in range(len(dims)):
        M = boundaries[q] if q < len(boundaries) and boundaries[q] else None
        ranks.append(smith_normal_form(M).rank if M and dims[q] and dims[q - 1] else 0)
    betti = []
    torsion = []
    for q in range(len(dims)):
        r_in = ranks[q + 1] if q + 1 < len(dims) else 0
        betti.append(dims[q] - ranks[q] - r_in)
        nxt = boundaries[q + 1] if q + 1 < len(boundaries) and boundaries[q + 1] else None
        tors = [d for d in smith_normal_form(nxt).factors if d > 1] if nxt and dims[q] and dims[q + 1] else []
        torsion.append(tors)
    return betti, torsion
