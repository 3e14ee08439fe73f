"""Linear algebra over the fraction field of Z[H].

Elimination is fraction-free (Bareiss), so every intermediate entry stays in
the group ring and divisions are exact.  Kernels and solutions are produced
from determinants of the pivot block, which keeps vectors polynomial.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from ..groupring import LaurentPoly, RankMismatch, exact_divide, univariate_gcd
from ..matrix import PolyMatrix


class Inconsistent(ArithmeticError):
    """A linear system has no solution over the fraction field."""


class FracScalar:
    """num / den with num, den in Q[H]; equality is decided by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None):
        if den is None:
            den = LaurentPoly.one(num.rank)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.rank != den.rank:
            raise RankMismatch("numerator and denominator ranks differ")
        if num.rank == 1 and not num.is_zero() and not den.is_monomial():
            g = univariate_gcd(num, den)
            if len(g) > 1:
                num, den = exact_divide(num.to_rational(), g), exact_divide(den.to_rational(), g)
        self.num = num
        self.den = den

    @property
    def rank(self) -> int:
        return self.num.rank

    @classmethod
    def of(cls, x: Union["FracScalar", LaurentPoly, int, Fraction], rank: int = 1) -> "FracScalar":
        if isinstance(x, FracScalar):
            return x
        if isinstance(x, LaurentPoly):
            return cls(x)
        return cls(LaurentPoly.constant(x, rank))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if not isinstance(other, FracScalar):
            if isinstance(other, (LaurentPoly, int, Fraction)):
                other = FracScalar.of(other, self.rank)
            else:
                return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        raise TypeError("FracScalar is not hashable")

    def __add__(self, other):
        o = FracScalar.of(other, self.rank)
        if self.den == o.den:
            return FracScalar(self.num + o.num, self.den)
        return FracScalar(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return FracScalar(-self.num, self.den)

    def __sub__(self, other):
        return self + (-FracScalar.of(other, self.rank))

    def __rsub__(self, other):
        return FracScalar.of(other, self.rank) - self

    def __mul__(self, other):
        o = FracScalar.of(other, self.rank)
        return FracScalar(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "FracScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return FracScalar(self.den, self.num)

    def __truediv__(self, other):
        return self * FracScalar.of(other, self.rank).inverse()

    def __repr__(self):
        if self.den == LaurentPoly.one(self.rank):
            return f"FracScalar({self.num})"
        return f"FracScalar(({self.num}) / ({self.den}))"


Entry = Union[LaurentPoly, FracScalar]


def _as_poly_rows(M, rank: int | None = None) -> Tuple[List[List[LaurentPoly]], int]:
    """Dense polynomial rows; rows holding fractions are multiplied by their common denominator."""
    if isinstance(M, PolyMatrix):
        return M.dense(), M.rank
    rows = [list(r) for r in M]
    if rank is None:
        for r in rows:
            for x in r:
                if isinstance(x, (LaurentPoly, FracScalar)):
                    rank = x.rank
                    break
            if rank is not None:
                break
    rank = 1 if rank is None else rank
    out = []
    for r in rows:
        fr = [FracScalar.of(x, rank) for x in r]
        den = LaurentPoly.one(rank)
        for x in fr:
            if x.den != den and not x.den.is_monomial():
                den = den * x.den
        row = []
        for x in fr:
            if x.den == LaurentPoly.one(rank):
                row.append(x.num * den)
            else:
                row.append(exact_divide(x.num * den, x.den))
        out.append(row)
    return out, rank


def _weight(p: LaurentPoly) -> Tuple[int, int]:
    return (len(p), sum(abs(x) for e in p.support() for x in e))


@dataclass(frozen=True)
class Elimination:
    rank: int
    pivot_rows: Tuple[int, ...]
    pivot_cols: Tuple[int, ...]


def bareiss(rows: Sequence[Sequence[LaurentPoly]], ring_rank: int, cancel=None) -> Elimination:
    """Fraction-free elimination with full pivoting; reports the rank and a nonsingular pivot block."""
    A = [list(r) for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    row_ids = list(range(m))
    col_ids = list(range(n))
    prev = LaurentPoly.one(ring_rank)
    k = 0
    while k < min(m, n):
        if cancel is not None and cancel():
            raise KeyboardInterrupt("cancelled")
        best = None
        for i in range(k, m):
            for j in range(k, n):
                if A[i][j]:
                    w = _weight(A[i][j])
                    if best is None or w < best[0]:
                        best = (w, i, j)
        if best is None:
            break
        _, i0, j0 = best
        A[k], A[i0] = A[i0], A[k]
        row_ids[k], row_ids[i0] = row_ids[i0], row_ids[k]
        for r in A:
            r[k], r[j0] = r[j0], r[k]
        col_ids[k], col_ids[j0] = col_ids[j0], col_ids[k]
        p = A[k][k]
        for i in range(k + 1, m):
            for j in range(k + 1, n):
                v = p * A[i][j] - A[i][k] * A[k][j]
                A[i][j] = exact_divide(v, prev) if v else v
            A[i][k] = LaurentPoly.zero(ring_rank)
        prev = p
        k += 1
    return Elimination(k, tuple(row_ids[:k]), tuple(col_ids[:k]))


def determinant(rows: Sequence[Sequence[LaurentPoly]], ring_rank: int) -> LaurentPoly:
    n = len(rows)
    if n == 0:
        return LaurentPoly.one(ring_rank)
    A = [list(r) for r in rows]
    sign = 1
    prev = LaurentPoly.one(ring_rank)
    for k in range(n):
        piv = None
        for i in range(k, n):
            if A[i][k]:
                if piv is None or _weight(A[i][k]) < _weight(A[piv][k]):
                    piv = i
        if piv is None:
            return LaurentPoly.zero(ring_rank)
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        p = A[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                v = p * A[i][j] - A[i][k] * A[k][j]
                A[i][j] = exact_divide(v, prev) if v else v
        prev = p
    return A[n - 1][n - 1] * sign


def frac_rank(M, rank: int | None = None) -> int:
    rows, r = _as_poly_rows(M, rank)
    return bareiss(rows, r).rank


def _kernel_poly(rows: List[List[LaurentPoly]], r: int) -> List[List[LaurentPoly]]:
    n = len(rows[0]) if rows else 0
    if not rows:
        return [[LaurentPoly.one(r) if i == j else LaurentPoly.zero(r) for i in range(n)] for j in range(n)]
    el = bareiss(rows, r)
    R, P = el.pivot_rows, el.pivot_cols
    block = [[rows[i][j] for j in P] for i in R]
    D = determinant(block, r)
    basis = []
    for j in range(n):
        if j in P:
            continue
        v = [LaurentPoly.zero(r)] * n
        v[j] = D
        for k, pk in enumerate(P):
            repl = [[(-rows[i][j] if c == k else block[a][c]) for c in range(len(P))] for a, i in enumerate(R)]
            v[pk] = determinant(repl, r)
        basis.append(_strip_content(v))
    return basis


def _strip_content(v: List[LaurentPoly]) -> List[LaurentPoly]:
    """Divide out common monomial factors and the integer content."""
    from math import gcd

    nz = [x for x in v if x]
    if not nz:
        return v
    r = nz[0].rank
    low = tuple(min(x.min_exponent()[i] for x in nz) for i in range(r))
    v = [x.shift([-a for a in low]) if x else x for x in v]
    if r == 1 and len(nz) > 0:
        g = nz[0]
        for x in nz[1:]:
            g = univariate_gcd(g, x)
        if len(g) > 1:
            g = _primitive(g)
            v = [exact_divide(x, g) if x else x for x in v]
    if all(x.is_integral() for x in nz):
        g = 0
        for x in v:
            g = gcd(g, x.content())
        if g > 1:
            v = [exact_divide(x, LaurentPoly.constant(g, r)) if x else x for x in v]
    return v


def _primitive(p: LaurentPoly) -> LaurentPoly:
    """Scale a rational polynomial to an integral one with content 1 and positive top coefficient."""
    from math import gcd, lcm

    den = 1
    for _, c in p.items():
        den = lcm(den, Fraction(c).denominator)
    q = LaurentPoly({e: int(Fraction(c) * den) for e, c in p.items()}, p.rank)
    g = q.content()
    top = q.coefficient(max(q.support()))
    return LaurentPoly({e: c // g * (1 if top > 0 else -1) for e, c in q.items()}, p.rank)


def frac_kernel(M, rank: int | None = None) -> List[List[LaurentPoly]]:
    """Basis of the right kernel as polynomial vectors (denominators cleared)."""
    rows, r = _as_poly_rows(M, rank)
    if isinstance(M, PolyMatrix) and M.nrows == 0:
        n = M.ncols
        return [[LaurentPoly.one(r) if i == j else LaurentPoly.zero(r) for i in range(n)] for j in range(n)]
    return _kernel_poly(rows, r)


def frac_solve(M, b: Sequence[Entry], rank: int | None = None) -> List[FracScalar]:
    """A particular solution x of M x = b; raises Inconsistent when none exists."""
    rows, r = _as_poly_rows(M, rank)
    bb = [FracScalar.of(x, r) for x in b]
    if len(bb) != len(rows):
        raise ValueError("right-hand side has the wrong length")
    n = len(rows[0]) if rows else (M.ncols if isinstance(M, PolyMatrix) else 0)
    den = LaurentPoly.one(r)
    for x in bb:
        if not x.den.is_monomial():
            den = den * x.den
    bpoly = [exact_divide(x.num * den, x.den) for x in bb]
    el = bareiss(rows, r)
    aug = bareiss([row + [bv] for row, bv in zip(rows, bpoly)], r)
    if aug.rank > el.rank:
        raise Inconsistent("right-hand side is not in the column space")
    R, P = el.pivot_rows, el.pivot_cols
    block = [[rows[i][j] for j in P] for i in R]
    D = determinant(block, r)
    x = [FracScalar(LaurentPoly.zero(r))] * n
    for k, pk in enumerate(P):
        repl = [[(bpoly[i] if c == k else block[a][c]) for c in range(len(P))] for a, i in enumerate(R)]
        x[pk] = FracScalar(determinant(repl, r), D * den)
    return x


def left_kernel(M: PolyMatrix) -> List[List[LaurentPoly]]:
    return frac_kernel(M.transpose())


@dataclass(frozen=True)
class FieldHomology:
    degree: int
    dimension: int
    basis: Tuple[Tuple[LaurentPoly, ...], ...]
    cycle_rank: int
    boundary_rank: int


def homology_over_fraction_field(C, q: int) -> FieldHomology:
    """Homology in degree q with every t_i an independent transcendental.

    The basis consists of polynomial cycles whose classes are independent
    modulo the image of the next boundary.
    """
    r = C.rank
    n = C.dim(q)
    dq = C.boundary(q)
    dq1 = C.boundary(q + 1)
    rank_in = frac_rank(dq1) if dq1.ncols and dq1.nrows else 0
    if dq.nrows and n:
        cycles = _kernel_poly(dq.dense(), r)
    else:
        cycles = [[LaurentPoly.one(r) if i == j else LaurentPoly.zero(r) for i in range(n)] for j in range(n)]
    dim = len(cycles) - rank_in
    image_cols = [dq1.column(j) for j in range(dq1.ncols)]
    basis: List[Tuple[LaurentPoly, ...]] = []
    current = rank_in
    for v in cycles:
        if len(basis) == dim:
            break
        cols = image_cols + [list(b) for b in basis] + [v]
        rows = [[c[i] for c in cols] for i in range(n)]
        rk = bareiss(rows, r).rank
        if rk > current:
            basis.append(tuple(v))
            current = rk
    return FieldHomology(q, dim, tuple(basis), len(cycles), rank_in)
