"""Deciding whether a homology class of the cover is movable to infinity.

Over Z and rank one the decision is exact: the class is movable iff the
lowest-coefficient ideal of its annihilator is (1).  Over Q any rank reduces
to a rank comparison over the fraction field.  For rank two and up over Z only
a bounded certificate search is offered.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .complexes import CycleVector, EquivariantChainComplex
from .exactalg.annihilator import (
    IdealBasisRank1, NotACycle, annihilator_rank1, lowest_coeff_ideal, movable_certificate,
)
from .exactalg.linalg import FracScalar, _strip_content, bareiss, frac_kernel, frac_solve
from .exactalg.smith import integer_solve
from .groupring import LaurentPoly, SignPolicy, XiOrder, in_S_xi, xi_lowest_term
from .matrix import PolyMatrix


class Outcome(str, enum.Enum):
    MOVABLE = "Movable"
    NOT_MOVABLE = "NotMovable"
    UNKNOWN = "Unknown"


class TRANSCENDENTAL:
    """Marker for an independent transcendental monodromy value."""

    def __repr__(self):
        return "TRANSCENDENTAL"


GENERIC = TRANSCENDENTAL()
MonoValue = Union[Fraction, TRANSCENDENTAL]


class UnsupportedMonodromy(ValueError):
    pass


@dataclass(frozen=True)
class MonodromyPoint:
    values: Tuple[MonoValue, ...]

    def __post_init__(self):
        vals = []
        for v in self.values:
            if isinstance(v, TRANSCENDENTAL):
                vals.append(GENERIC)
            else:
                v = Fraction(v)
                if v == 0:
                    raise ValueError("monodromy values must be nonzero")
                vals.append(v)
        object.__setattr__(self, "values", tuple(vals))

    @classmethod
    def generic(cls, rank: int) -> "MonodromyPoint":
        return cls((GENERIC,) * rank)

    @classmethod
    def parse(cls, text: str) -> "MonodromyPoint":
        vals = []
        for tok in text.replace(",", " ").split():
            vals.append(GENERIC if tok.lower() in ("generic", "transcendental", "*") else Fraction(tok))
        return cls(tuple(vals))

    @property
    def rank(self) -> int:
        return len(self.values)

    def is_generic(self) -> bool:
        return all(isinstance(v, TRANSCENDENTAL) for v in self.values)

    def is_rational(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.values)

    def as_strings(self) -> List[str]:
        return ["generic" if isinstance(v, TRANSCENDENTAL) else str(v) for v in self.values]


@dataclass(frozen=True)
class PairingWitness:
    cocycle: Tuple[FracScalar, ...]
    cycle: CycleVector
    value: FracScalar
    monodromy: MonodromyPoint


@dataclass(frozen=True)
class MovabilityVerdict:
    outcome: Outcome
    ring: str = "Z"
    delta: Optional[LaurentPoly] = None
    chain: Optional[Tuple[LaurentPoly, ...]] = None
    d: Optional[int] = None
    witness: Optional[PairingWitness] = None
    box: Optional[int] = None
    degree_bound: Optional[int] = None
    policy: SignPolicy = SignPolicy.STRICT
    annihilator: Optional[Tuple[LaurentPoly, ...]] = None
    notes: Tuple[str, ...] = ()

    @property
    def movable(self) -> Optional[bool]:
        if self.outcome is Outcome.UNKNOWN:
            return None
        return self.outcome is Outcome.MOVABLE


def _require_cycle(C: EquivariantChainComplex, z: CycleVector) -> None:
    if not C.is_cycle(z):
        raise NotACycle(f"vector in degree {z.degree} is not a cycle")


def _check_xi(C: EquivariantChainComplex) -> None:
    if C.xi.rank != C.rank:
        raise ValueError(f"xi has rank {C.xi.rank} but the cover has rank {C.rank}")


# ---------------------------------------------------------------------------
# certificates


def verify_certificate(C: EquivariantChainComplex, z: CycleVector, delta: LaurentPoly,
                       chain: Sequence[LaurentPoly], policy: SignPolicy = SignPolicy.STRICT) -> bool:
    """delta in S_xi and d(chain) == delta * z, checked exactly."""
    if not in_S_xi(delta, C.xi, policy):
        return False
    if len(chain) != C.dim(z.degree + 1):
        return False
    return C.boundary(z.degree + 1).apply(list(chain)) == [delta * c for c in z.coords]


def verify_field_certificate(C: EquivariantChainComplex, z: CycleVector, x: LaurentPoly,
                             chain: Sequence[LaurentPoly]) -> bool:
    if x.is_zero() or len(chain) != C.dim(z.degree + 1):
        return False
    return C.boundary(z.degree + 1).apply(list(chain)) == [x * c for c in z.coords]


# ---------------------------------------------------------------------------
# field coefficients


@dataclass(frozen=True)
class FieldVerdict:
    movable: bool
    x: Optional[LaurentPoly] = None
    chain: Optional[Tuple[LaurentPoly, ...]] = None
    witness: Optional[PairingWitness] = None


def decide_movable_field(C: EquivariantChainComplex, z: CycleVector) -> FieldVerdict:
    """Movable over Q iff z dies in homology over the fraction field.

    The certificate x is the common denominator of a solution of d c = z,
    so that d(x c) = x z with x c polynomial.  x is normalized to have a
    positive xi-lowest coefficient.
    """
    _require_cycle(C, z)
    r = C.rank
    if z.is_zero():
        return FieldVerdict(True, LaurentPoly.one(r), C.zero_chain(z.degree + 1))
    D = C.boundary(z.degree + 1)
    rows = D.dense()
    base = bareiss(rows, r).rank if D.ncols else 0
    aug = bareiss([row + [zc] for row, zc in zip(rows, z.coords)], r).rank
    if aug > base:
        return FieldVerdict(False, witness=evaluate_obstruction(C, z, MonodromyPoint.generic(r)).witness)
    sol = frac_solve(D, z.coords)
    den = LaurentPoly.one(r)
    for s in sol:
        if s.den != den:
            den = den * s.den
    nums = [FracScalar(s.num * den, s.den) for s in sol]
    from .groupring import exact_divide

    chain = [exact_divide(n.num, n.den) for n in nums]
    vec = _strip_content([den] + chain)
    x, chain = vec[0], vec[1:]
    c, _ = xi_lowest_term(x, C.xi)
    if c < 0:
        x, chain = -x, [-p for p in chain]
    if not verify_field_certificate(C, z, x, chain):
        raise ArithmeticError("internal error: field certificate does not verify")
    return FieldVerdict(True, x, tuple(chain))


# ---------------------------------------------------------------------------
# integer coefficients


def decide_movable_int(C: EquivariantChainComplex, z: CycleVector, policy: SignPolicy = SignPolicy.STRICT,
                       box: int = 3, cancel=None) -> MovabilityVerdict:
    _require_cycle(C, z)
    _check_xi(C)
    if z.is_zero():
        found = search_certificate(C, z, box)
        return MovabilityVerdict(Outcome.MOVABLE, "Z", found[0], found[1], policy=policy,
                                 notes=("zero class",))
    if C.rank != 1:
        found = search_certificate(C, z, box)
        if found is not None:
            return MovabilityVerdict(Outcome.MOVABLE, "Z", found[0], found[1], box=box, policy=policy)
        return MovabilityVerdict(Outcome.UNKNOWN, "Z", box=box, policy=policy,
                                 notes=("exact integral decision needs rank one; bounded search found nothing",))
    ann = annihilator_rank1(C, z, cancel=cancel)
    d = lowest_coeff_ideal(ann, C.xi)
    gens = ann.generators
    if d == 1:
        cert = movable_certificate(ann, C.xi)
        assert verify_certificate(C, z, cert.delta, cert.chain, policy)
        return MovabilityVerdict(Outcome.MOVABLE, "Z", cert.delta, cert.chain, d=1, policy=policy, annihilator=gens)
    if d == 0:
        w = evaluate_obstruction(C, z, MonodromyPoint.generic(1))
        return MovabilityVerdict(Outcome.NOT_MOVABLE, "Z", d=0, witness=w.witness, policy=policy, annihilator=gens)
    return MovabilityVerdict(Outcome.NOT_MOVABLE, "Z", d=d, policy=policy, annihilator=gens)


def _positive_candidates(xi: XiOrder, radius: int) -> List[Tuple[int, ...]]:
    r = xi.rank
    pts = [e for e in itertools.product(range(-radius, radius + 1), repeat=r) if xi.sign(e) > 0]
    return sorted(pts, key=lambda e: (sum(abs(x) for x in e), tuple(-x for x in e)))


def _support_box(polys: Sequence[LaurentPoly], r: int):
    nz = [p for p in polys if p]
    if not nz:
        return (0,) * r, (0,) * r
    lo = tuple(min(p.min_exponent()[i] for p in nz) for i in range(r))
    hi = tuple(max(p.max_exponent()[i] for p in nz) for i in range(r))
    return lo, hi


def _int(c) -> int:
    if getattr(c, "denominator", 1) != 1:
        raise ValueError("integral search needs integer coefficients")
    return int(c)


def search_certificate(C: EquivariantChainComplex, z: CycleVector, box: int,
                       coeff_bound: int | None = None) -> Optional[Tuple[LaurentPoly, Tuple[LaurentPoly, ...]]]:
    """Look for Delta = 1 + sum d_g g (g xi-positive, |g|_inf <= box) and a chain c with dc = Delta z.

    Supports are enlarged one candidate at a time in a fixed order, so the
    first certificate found is deterministic.  Returns None when the box is
    exhausted; that is inconclusive.
    """
    r = C.rank
    xi = C.xi
    cands = _positive_candidates(xi, box)
    q = z.degree
    if z.is_zero():
        delta = LaurentPoly.one(r) + (LaurentPoly.monomial(cands[0]) if cands else LaurentPoly.zero(r))
        return delta, C.zero_chain(q + 1)
    D = C.boundary(q + 1)
    n_cells = C.dim(q)
    m_cols = D.ncols
    zlo, zhi = _support_box(z.coords, r)
    dlo, dhi = _support_box(list(D.entries.values()), r)
    clo = tuple(a - box - (b2 - b1) - max(0, b2) for a, b1, b2 in zip(zlo, dlo, dhi))
    chi = tuple(a + box + (b2 - b1) - min(0, b1) for a, b1, b2 in zip(zhi, dlo, dhi))
    chain_exps = list(itertools.product(*[range(a, b + 1) for a, b in zip(clo, chi)]))
    cols = {}
    for (i, j), v in D.entries.items():
        cols.setdefault(j, []).append((i, v))

    for k in range(len(cands) + 1):
        support = cands[:k]
        unknowns = [("d", g) for g in support] + [("c", j, h) for j in range(m_cols) for h in chain_exps]
        eq_index: Dict[Tuple[int, Tuple[int, ...]], int] = {}
        entries: List[Dict[int, int]] = []
        rhs: Dict[int, int] = {}

        def eq(i, e):
            key = (i, e)
            if key not in eq_index:
                eq_index[key] = len(entries)
                entries.append({})
            return eq_index[key]

        for i, zc in enumerate(z.coords):
            for e, c in zc.items():
                row = eq(i, e)
                rhs[row] = rhs.get(row, 0) - _int(c)
        for u, var in enumerate(unknowns):
            if var[0] == "d":
                g = var[1]
                for i, zc in enumerate(z.coords):
                    for e, c in zc.items():
                        row = eq(i, tuple(a + b for a, b in zip(e, g)))
                        entries[row][u] = entries[row].get(u, 0) + _int(c)
            else:
                _, j, h = var
                for i, v in cols.get(j, ()):
                    for e, c in v.items():
                        row = eq(i, tuple(a + b for a, b in zip(e, h)))
                        entries[row][u] = entries[row].get(u, 0) - _int(c)
        A = [[row.get(u, 0) for u in range(len(unknowns))] for row in entries]
        b = [rhs.get(i, 0) for i in range(len(entries))]
        sol = integer_solve(A, b)
        if sol is None:
            continue
        delta = LaurentPoly.one(r)
        chain = [LaurentPoly.zero(r)] * m_cols
        for val, var in zip(sol, unknowns):
            if not val:
                continue
            if var[0] == "d":
                delta = delta + LaurentPoly.monomial(var[1], val)
            else:
                chain[var[1]] = chain[var[1]] + LaurentPoly.monomial(var[2], val)
        if coeff_bound is not None and any(abs(c) > coeff_bound for _, c in delta.items()):
            continue
        chain = tuple(chain)
        if not verify_certificate(C, z, delta, chain):
            raise ArithmeticError("internal error: search produced an invalid certificate")
        return delta, chain
    return None


# ---------------------------------------------------------------------------
# algebraic integers and the pairing obstruction


def is_xi_algebraic_integer(mono: MonodromyPoint, xi: XiOrder) -> bool:
    """Does the monodromy kernel contain an integer polynomial with xi-top coefficient 1?"""
    if mono.rank != xi.rank:
        raise ValueError(f"monodromy has {mono.rank} values but xi has rank {xi.rank}")
    if mono.rank == 0:
        return False
    if mono.is_generic():
        return False
    if not mono.is_rational():
        raise UnsupportedMonodromy("mixed rational and transcendental monodromy is not supported")
    if mono.rank != 1:
        raise UnsupportedMonodromy("rational monodromy is only supported in rank one")
    x = mono.values[0]
    if xi.sign((1,)) > 0:
        return x.denominator == 1
    return abs(x.numerator) == 1


def _specialize(p: LaurentPoly, mono: MonodromyPoint) -> LaurentPoly:
    """Apply t_i -> x_i^-1; generic values stay symbolic (the substitution is then the antipode)."""
    if mono.is_generic():
        return p.involution()
    if not mono.is_rational():
        raise UnsupportedMonodromy("mixed rational and transcendental monodromy is not supported")
    return LaurentPoly.constant(p.evaluate([1 / v for v in mono.values]), 0)


@dataclass(frozen=True)
class ObstructionResult:
    image_nonzero: bool
    witness: Optional[PairingWitness]
    algebraic_integer: Optional[bool]
    not_movable: bool
    note: str = ""


def evaluate_obstruction(C: EquivariantChainComplex, z: CycleVector, mono: MonodromyPoint) -> ObstructionResult:
    _require_cycle(C, z)
    if mono.rank != C.rank:
        raise ValueError(f"monodromy has {mono.rank} values but the cover has rank {C.rank}")
    q = z.degree
    D = C.boundary(q + 1).map(lambda v: _specialize(v, mono), rank=C.rank if mono.is_generic() else 0)
    zs = [_specialize(c, mono) for c in z.coords]
    ring_rank = C.rank if mono.is_generic() else 0
    if D.ncols:
        cocycles = frac_kernel(D.transpose(), ring_rank)
    else:
        n = C.dim(q)
        cocycles = [[LaurentPoly.one(ring_rank) if i == j else LaurentPoly.zero(ring_rank) for i in range(n)]
                    for j in range(n)]
    witness = None
    for v in cocycles:
        val = LaurentPoly.zero(ring_rank)
        for a, b in zip(v, zs):
            val = val + a * b
        if val:
            witness = PairingWitness(tuple(FracScalar(a) for a in v), z, FracScalar(val), mono)
            break
    try:
        alg = is_xi_algebraic_integer(mono, C.xi)
    except UnsupportedMonodromy as exc:
        return ObstructionResult(witness is not None, witness, None, False, str(exc))
    return ObstructionResult(witness is not None, witness, alg, witness is not None and not alg)


def verify_pairing(C: EquivariantChainComplex, w: PairingWitness) -> bool:
    """The functional is a cocycle of the specialized complex and pairs to the recorded nonzero value."""
    mono = w.monodromy
    ring_rank = C.rank if mono.is_generic() else 0
    q = w.cycle.degree
    D = C.boundary(q + 1).map(lambda v: _specialize(v, mono), rank=ring_rank)
    v = list(w.cocycle)
    for j in range(D.ncols):
        col = D.column(j)
        acc = FracScalar(LaurentPoly.zero(ring_rank))
        for a, b in zip(v, col):
            acc = acc + a * FracScalar(b)
        if not acc.is_zero():
            return False
    val = FracScalar(LaurentPoly.zero(ring_rank))
    for a, c in zip(v, w.cycle.coords):
        val = val + a * FracScalar(_specialize(c, mono))
    return not val.is_zero() and val == w.value


def verify_verdict(C: EquivariantChainComplex, z: CycleVector, verdict: MovabilityVerdict) -> bool:
    """Re-check a verdict independently of the code path that produced it."""
    if verdict.outcome is Outcome.MOVABLE:
        if verdict.ring == "Q":
            return verify_field_certificate(C, z, verdict.delta, verdict.chain)
        return verify_certificate(C, z, verdict.delta, verdict.chain, verdict.policy)
    if verdict.outcome is Outcome.NOT_MOVABLE:
        if verdict.witness is not None:
            return verify_pairing(C, verdict.witness)
        if verdict.d is not None and verdict.d > 1:
            return lowest_coeff_ideal(annihilator_rank1(C, z), C.xi) == verdict.d
        return False
    return True
