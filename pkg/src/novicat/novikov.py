"""Truncated Novikov series, cyclic modules, diagonalization and infinite chains.

A ``NovikovSeries`` stands for every element of the completion that agrees
with ``body`` on terms whose first xi-coordinate is below ``cutoff``.  An
exact (finite) element has ``cutoff = None``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .groupring import Exponent, LaurentPoly, RankMismatch, XiOrder, in_S_xi, split_S_xi, xi_lowest_term

Cutoff = Optional[Fraction]


class XiMismatch(ValueError):
    pass


class NonUnit(ArithmeticError):
    def __init__(self, coefficient, exponent=None):
        self.coefficient = coefficient
        self.exponent = exponent
        super().__init__(f"NonUnit({coefficient}): lowest coefficient is not a unit")


class UnboundedSupport(ArithmeticError):
    """A geometric series whose ratio has terms of first xi-coordinate 0."""


def _min_cut(a: Cutoff, b: Cutoff) -> Cutoff:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _add_cut(a: Cutoff, b: Cutoff) -> Cutoff:
    if a is None or b is None:
        return None
    return a + b


def truncate(p: LaurentPoly, xi: XiOrder, cutoff: Cutoff) -> LaurentPoly:
    if cutoff is None:
        return p
    return LaurentPoly({e: c for e, c in p.items() if xi.first(e) < cutoff}, p.rank)


@dataclass(frozen=True)
class NovikovSeries:
    body: LaurentPoly
    cutoff: Cutoff
    xi: XiOrder

    def __post_init__(self):
        if self.body.rank != self.xi.rank:
            raise RankMismatch(f"body rank {self.body.rank} vs xi rank {self.xi.rank}")
        if self.cutoff is not None:
            object.__setattr__(self, "cutoff", Fraction(self.cutoff))
            object.__setattr__(self, "body", truncate(self.body, self.xi, self.cutoff))

    @classmethod
    def exact(cls, p: LaurentPoly, xi: XiOrder) -> "NovikovSeries":
        return cls(p, None, xi)

    @property
    def rank(self) -> int:
        return self.xi.rank

    def is_exact(self) -> bool:
        return self.cutoff is None

    def is_zero(self) -> bool:
        """True when the body is empty; for truncated series this means zero below the cutoff only."""
        return self.body.is_zero()

    def valuation(self) -> Cutoff:
        """Lower bound for the first xi-coordinate of every term; None means +infinity."""
        if self.body.is_zero():
            return self.cutoff
        low = min(self.xi.first(e) for e in self.body.support())
        return low if self.cutoff is None else min(low, self.cutoff)

    def with_cutoff(self, cutoff: Cutoff) -> "NovikovSeries":
        return NovikovSeries(self.body, _min_cut(self.cutoff, cutoff), self.xi)

    def __add__(self, other):
        return nov_add(self, other)

    def __sub__(self, other):
        return nov_add(self, -other)

    def __neg__(self):
        return NovikovSeries(-self.body, self.cutoff, self.xi)

    def __mul__(self, other):
        return nov_mul(self, other)

    def agrees_with(self, other: "NovikovSeries") -> bool:
        """Equality below the smaller cutoff."""
        cut = _min_cut(self.cutoff, other.cutoff)
        return truncate(self.body - other.body, self.xi, cut).is_zero()

    def __str__(self):
        from .groupring import format_poly

        tail = "" if self.cutoff is None else f" + O({self.cutoff})"
        return format_poly(self.body) + tail


def _same_xi(p: NovikovSeries, q: NovikovSeries) -> None:
    if p.xi != q.xi:
        raise XiMismatch(f"{p.xi} vs {q.xi}")


def nov_add(p: NovikovSeries, q: NovikovSeries) -> NovikovSeries:
    _same_xi(p, q)
    return NovikovSeries(p.body + q.body, _min_cut(p.cutoff, q.cutoff), p.xi)


def nov_mul(p: NovikovSeries, q: NovikovSeries) -> NovikovSeries:
    """Product; the cutoff is min(tau_p + mu_q, tau_q + mu_p) with mu the valuation."""
    _same_xi(p, q)
    cut = _min_cut(_add_cut(p.cutoff, q.valuation()), _add_cut(q.cutoff, p.valuation()))
    if p.body.is_zero() and p.cutoff is None or q.body.is_zero() and q.cutoff is None:
        return NovikovSeries(LaurentPoly.zero(p.rank), None, p.xi)
    return NovikovSeries(p.body * q.body, cut, p.xi)


def _geometric(y: LaurentPoly, xi: XiOrder, below: Fraction) -> LaurentPoly:
    """sum_{i>=0} y^i, keeping terms with first xi-coordinate < below."""
    one = LaurentPoly.one(y.rank)
    if y.is_zero():
        return one if below > 0 else LaurentPoly.zero(y.rank)
    step = min(xi.first(e) for e in y.support())
    if step <= 0:
        raise UnboundedSupport("ratio has terms of first xi-coordinate 0; the partial sums are not bounded")
    total = one if below > 0 else LaurentPoly.zero(y.rank)
    power = one
    for _ in range(int(math.ceil(below / step)) + 1):
        power = truncate(power * y, xi, below)
        if power.is_zero():
            break
        total = total + power
    return total


def nov_invert(u: NovikovSeries, cutoff: Fraction | int | None = None, ring: str = "A") -> NovikovSeries:
    """Inverse of a unit of A (lowest coefficient +-1); ``ring="A0"`` also requires lowest exponent 0.

    For exact input the precision of the result is set by ``cutoff``.
    """
    if u.body.is_zero():
        raise NonUnit(0)
    c, h = xi_lowest_term(u.body, u.xi)
    if c not in (1, -1):
        raise NonUnit(c, h)
    if ring == "A0" and any(h):
        raise NonUnit(c, h)
    low = u.xi.first(h)
    if u.cutoff is not None:
        out_cut = u.cutoff - 2 * low
        if cutoff is not None:
            out_cut = min(out_cut, Fraction(cutoff))
    else:
        if cutoff is None:
            raise ValueError("inverting an exact series needs an explicit cutoff")
        out_cut = Fraction(cutoff)
    _, _, y = split_S_xi(u.body * c, u.xi)
    g = _geometric(y, u.xi, out_cut + low)
    inv = g.shift([-x for x in h]) * c
    return NovikovSeries(inv, out_cut, u.xi)


# ---------------------------------------------------------------------------
# cyclic modules


class CyclicKind(str, enum.Enum):
    UNIT = "Unit"
    FIRST = "FirstKind"
    SECOND = "SecondKind"


@dataclass(frozen=True)
class CyclicClassification:
    g: Exponent
    alpha: int
    kind: CyclicKind


def classify_cyclic(a: LaurentPoly, xi: XiOrder) -> CyclicClassification:
    """Write a = g (alpha + h beta) with g the xi-lowest exponent of a."""
    if a.is_zero():
        raise ValueError("cannot classify the zero module generator")
    alpha, g = xi_lowest_term(a, xi)
    if xi.sign(g) < 0:
        raise ValueError(f"lowest exponent {g} is xi-negative; a does not lie in A0")
    alpha = int(alpha)
    if abs(alpha) > 1:
        kind = CyclicKind.SECOND
    elif any(g):
        kind = CyclicKind.FIRST
    else:
        kind = CyclicKind.UNIT
    return CyclicClassification(g, alpha, kind)


# ---------------------------------------------------------------------------
# truncated diagonalization


SeriesMatrix = List[List[NovikovSeries]]


def _identity(n: int, xi: XiOrder) -> SeriesMatrix:
    one = LaurentPoly.one(xi.rank)
    zero = LaurentPoly.zero(xi.rank)
    return [[NovikovSeries(one if i == j else zero, None, xi) for j in range(n)] for i in range(n)]


def series_matmul(A: SeriesMatrix, B: SeriesMatrix, xi: XiOrder) -> SeriesMatrix:
    n = len(B[0]) if B else 0
    zero = NovikovSeries(LaurentPoly.zero(xi.rank), None, xi)
    out = []
    for row in A:
        new = []
        for j in range(n):
            acc = zero
            for k, a in enumerate(row):
                if a.body.is_zero() and a.cutoff is None:
                    continue
                acc = acc + a * B[k][j]
            new.append(acc)
        out.append(new)
    return out


@dataclass
class DegreeBlock:
    degree: int
    row_offset: int
    diagonal: List[NovikovSeries]

    @property
    def mu(self) -> int:
        return len(self.diagonal)


@dataclass
class DiagonalizedComplex:
    xi: XiOrder
    cutoff: Fraction
    blocks: Dict[int, DegreeBlock]
    basis: Dict[int, SeriesMatrix]
    inverse: Dict[int, SeriesMatrix]
    complete: bool
    notes: List[str] = field(default_factory=list)

    def mu(self, q: int) -> int:
        return self.blocks[q].mu if q in self.blocks else 0

    def effective_cutoff(self) -> Cutoff:
        cut: Cutoff = None
        for M in list(self.basis.values()) + list(self.inverse.values()):
            for row in M:
                for x in row:
                    cut = _min_cut(cut, x.cutoff)
        for b in self.blocks.values():
            for x in b.diagonal:
                cut = _min_cut(cut, x.cutoff)
        return cut


def _pivot_key(x: NovikovSeries):
    c, e = xi_lowest_term(x.body, x.xi)
    return (abs(c), x.xi.value(e), e)


def truncated_diagonalize(C, cutoff, max_steps: int = 10000) -> DiagonalizedComplex:
    """Diagonalize the boundaries of C over the completed ring, degree by degree.

    Unit pivots are eliminated exactly; other pivots go through Euclidean
    reduction on lowest coefficients.  If an entry only disappears because it
    was pushed past the cutoff, or the step budget runs out, ``complete`` is
    set to False.
    """
    xi = C.xi
    r = C.rank
    cut = Fraction(cutoff)
    zero_exact = NovikovSeries(LaurentPoly.zero(r), None, xi)
    basis = {q: _identity(C.dim(q), xi) for q in range(len(C.ranks))}
    inverse = {q: _identity(C.dim(q), xi) for q in range(len(C.ranks))}
    blocks: Dict[int, DegreeBlock] = {}
    complete = True
    notes: List[str] = []
    offset = 0
    for q in range(1, len(C.ranks)):
        D = [[NovikovSeries(x, None, xi) for x in row] for row in C.boundary(q).dense()]
        # express in the current basis of C_{q-1} (coordinates: inverse @ D)
        D = series_matmul(inverse[q - 1], D, xi) if D else D
        m, n = C.dim(q - 1), C.dim(q)
        Bq, Biq = basis[q], inverse[q]
        Bp, Bip = basis[q - 1], inverse[q - 1]

        def col_add(j, k, c):  # col_j += c * col_k on D and on basis of C_q
            for row in D:
                if not row[k].is_zero() or row[k].cutoff is not None:
                    row[j] = row[j] + c * row[k]
            for row in Bq:
                row[j] = row[j] + c * row[k]
            Biq[k] = [a - c * b for a, b in zip(Biq[k], Biq[j])]

        def row_add(i, k, c):  # row_i += c * row_k on D (a change of basis of C_{q-1})
            D[i] = [a + c * b for a, b in zip(D[i], D[k])]
            Bip[i] = [a + c * b for a, b in zip(Bip[i], Bip[k])]
            for row in Bp:
                row[k] = row[k] - c * row[i]

        def swap_cols(j, k):
            for M in (D, Bq):
                for row in M:
                    row[j], row[k] = row[k], row[j]
            Biq[j], Biq[k] = Biq[k], Biq[j]

        def swap_rows(i, k):
            D[i], D[k] = D[k], D[i]
            Bip[i], Bip[k] = Bip[k], Bip[i]
            for row in Bp:
                row[i], row[k] = row[k], row[i]

        def live(x: NovikovSeries) -> bool:
            return not x.body.is_zero()

        diag: List[NovikovSeries] = []
        k = 0
        steps = 0
        while offset + k < m and k < n:
            cands = [(i, j) for i in range(offset + k, m) for j in range(k, n) if live(D[i][j])]
            if not cands:
                break
            i0, j0 = min(cands, key=lambda ij: (_pivot_key(D[ij[0]][ij[1]]), ij))
            pr = offset + k
            swap_rows(pr, i0)
            swap_cols(k, j0)
            while True:
                steps += 1
                if steps > max_steps:
                    complete = False
                    notes.append(f"degree {q}: step budget exhausted")
                    break
                p = D[pr][k]
                pc, pe = xi_lowest_term(p.body, xi)
                others = [(i, k) for i in range(pr + 1, m) if live(D[i][k])] + \
                         [(pr, j) for j in range(k + 1, n) if live(D[pr][j])]
                if not others:
                    break
                if pc in (1, -1):
                    pinv = nov_invert(p, cut)
                    for (i, j) in others:
                        if j == k:
                            row_add(i, pr, -(D[i][k] * pinv))
                            D[i][k] = zero_exact
                        else:
                            col_add(j, k, -(pinv * D[pr][j]))
                            D[pr][j] = zero_exact
                    continue
                # Euclidean step on the first offending entry
                i, j = others[0]
                x = D[i][j]
                xc, xe = xi_lowest_term(x.body, xi)
                quot = xc // pc
                if quot == 0:
                    if j == k:
                        swap_rows(pr, i)
                    else:
                        swap_cols(k, j)
                    continue
                shift = tuple(a - b for a, b in zip(xe, pe))
                factor = NovikovSeries(LaurentPoly.monomial(shift, quot), None, xi)
                if j == k:
                    row_add(i, pr, -factor)
                else:
                    col_add(j, k, -factor)
                y = D[i][j]
                if not live(y):
                    if y.cutoff is not None:
                        complete = False
                        notes.append(f"degree {q}: entry ({i},{j}) vanished only below the cutoff")
                    D[i][j] = zero_exact if y.cutoff is None else y
                    continue
                if _pivot_key(y) < _pivot_key(D[pr][k]):
                    if j == k:
                        swap_rows(pr, i)
                    else:
                        swap_cols(k, j)
            if steps > max_steps:
                break
            diag.append(D[pr][k])
            k += 1
        # any leftover live entries outside the diagonal mean the block is not diagonal
        for i in range(m):
            for j in range(n):
                on_diag = j < len(diag) and i == offset + j
                if not on_diag and live(D[i][j]):
                    complete = False
                    notes.append(f"degree {q}: residual entry at ({i},{j})")
        blocks[q] = DegreeBlock(q, offset, diag)
        offset = len(diag)
    return DiagonalizedComplex(xi, cut, blocks, basis, inverse, complete, notes)


def check_diagonalization(C, result: DiagonalizedComplex) -> bool:
    """Transforms invert each other and conjugate every boundary to the recorded diagonal."""
    xi = result.xi
    r = C.rank
    for q, B in result.basis.items():
        n = len(B)
        prod = series_matmul(B, result.inverse[q], xi)
        prod2 = series_matmul(result.inverse[q], B, xi)
        for i in range(n):
            for j in range(n):
                target = NovikovSeries(LaurentPoly.one(r) if i == j else LaurentPoly.zero(r), None, xi)
                if not prod[i][j].agrees_with(target) or not prod2[i][j].agrees_with(target):
                    return False
    for q, blk in result.blocks.items():
        D = [[NovikovSeries(x, None, xi) for x in row] for row in C.boundary(q).dense()]
        if not D:
            continue
        M = series_matmul(series_matmul(result.inverse[q - 1], D, xi), result.basis[q], xi)
        for i, row in enumerate(M):
            for j, x in enumerate(row):
                if j < blk.mu and i == blk.row_offset + j:
                    if not x.agrees_with(blk.diagonal[j]):
                        return False
                elif not x.agrees_with(NovikovSeries(LaurentPoly.zero(r), None, xi)):
                    return False
    return True


# ---------------------------------------------------------------------------
# the infinite chain of a movable class


class CertificateError(ValueError):
    pass


@dataclass(frozen=True)
class InfiniteChain:
    chain: Tuple[LaurentPoly, ...]
    cutoff: Fraction
    spread: Fraction
    residual: Tuple[LaurentPoly, ...]

    @property
    def certified_from(self) -> Fraction:
        return self.cutoff - self.spread

    def residual_valuation(self, xi: XiOrder) -> Cutoff:
        vals = [xi.first(e) for p in self.residual for e in p.support()]
        return min(vals) if vals else None

    def terms(self) -> int:
        return sum(len(p) for p in self.chain)


def _spread(p: LaurentPoly, xi: XiOrder) -> Fraction:
    if p.is_zero():
        return Fraction(0)
    vals = [xi.first(e) for e in p.support()]
    return max(vals) - min(vals)


def chain_spread(C, c1: Sequence[LaurentPoly], degree: int) -> Fraction:
    """max(0, xi-spreads of boundary entries and of c1, minus the least xi-value in the boundary)."""
    xi = C.xi
    s = Fraction(0)
    M = C.boundary(degree + 1)
    low = None
    for v in M.entries.values():
        s = max(s, _spread(v, xi))
        m = min(xi.first(e) for e in v.support())
        low = m if low is None else min(low, m)
    for p in c1:
        s = max(s, _spread(p, xi))
    if low is not None:
        s = max(s, -low)
    return s


def build_infinite_chain(C, z, delta: LaurentPoly, c1: Sequence[LaurentPoly], cutoff) -> InfiniteChain:
    """c' = h^-1 sum_i y^i c1 (with delta = h (1 - y)), cut at first xi-coordinate < cutoff."""
    xi = C.xi
    tau = Fraction(cutoff)
    if not in_S_xi(delta, xi):
        raise CertificateError(f"{delta} is not in S_xi")
    c1 = tuple(c1)
    M = C.boundary(z.degree + 1)
    if M.apply(list(c1)) != [delta * c for c in z.coords]:
        raise CertificateError("the boundary of c1 is not delta * z")
    _, h, y = split_S_xi(delta, xi)
    hinv = LaurentPoly.monomial([-x for x in h])
    lows = [xi.first(e) for p in c1 for e in p.support()]
    base = (min(lows) if lows else Fraction(0)) - xi.first(h)
    geo = _geometric(y, xi, tau - base) if lows else LaurentPoly.one(C.rank)
    chain = tuple(truncate(hinv * geo * p, xi, tau) for p in c1)
    residual = tuple(a - b for a, b in zip(M.apply(list(chain)), z.coords))
    s = chain_spread(C, c1, z.degree)
    result = InfiniteChain(chain, tau, s, residual)
    low = result.residual_valuation(xi)
    if low is not None and low < tau - s:
        raise CertificateError(f"residual has a term at {low} below the certified bound {tau - s}")
    return result
