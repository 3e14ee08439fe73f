"""Bounds on cat(X), cat(X, xi), cat^1(X, xi) and ccat^1(X, xi).

A ``BoundLedger`` keeps the best lower and upper bound for every invariant.
Each bound is a ``BoundStep`` naming its rule and premises; ``replay`` checks
a step by recomputing its value from the premises.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .expr import Atom, ClassExpr, signature
from .weights import CWGT_EXACT, INF, TraceStep, WeightFact, propagate_weights, replay_trace, Claim

INVARIANTS = ("cat", "cat_xi", "cat1", "ccat1")
LOWER, UPPER = "lower", "upper"

# invariants in increasing order when xi is arbitrary
CHAIN = ("cat_xi", "cat1", "ccat1")

BOUND_RULES: Dict[str, str] = {
    "declared": "value supplied with the input or from the built-in fact base",
    "order": "cat(X,xi) <= cat^1(X,xi) <= ccat^1(X,xi)",
    "cat1-le-cat": "cat^1(X,xi) <= cat(X)",
    "ccat1-connected": "ccat^1(X,xi) <= cat(X) - 1 for connected X and xi != 0",
    "xi-zero": "for xi = 0 all of cat(X,xi), cat^1(X,xi), ccat^1(X,xi) equal cat(X)",
    "dimension": "cat^1(X,xi) <= dim X for xi != 0 (applied to connected spaces only)",
    "product": "ccat^1(X x Y) <= ccat^1(X) + ccat^1(Y) - 1 when one of the factors has ccat^1 > 0",
    "cwgt-pairing": "cat(X) >= cwgt(z) + cwgt(u) + 1 when <u, z> != 0",
    "obstruction": "cat^1(X,xi) >= cwgt(z) + k + 1 for a nonzero pairing with k positive-degree classes "
                   "in a bundle that is not a xi-algebraic integer",
    "obstruction-xi-zero": "cat(X) >= cwgt(z) + k + 1 for a nonzero pairing with k positive-degree classes",
}


class BoundError(ValueError):
    pass


class RejectedBundle(BoundError):
    """The pairing lives in a xi-algebraic integer bundle, so it says nothing about cat^1."""


class ProductHypothesis(BoundError):
    pass


@dataclass(frozen=True)
class Premise:
    source: str  # "<ledger>:<invariant>:<side>", "cwgt:<expr>", "k", "dim"
    value: float


@dataclass(frozen=True)
class BoundStep:
    rule: str
    invariant: str
    side: str
    value: float
    premises: Tuple[Premise, ...] = ()
    note: str = ""
    weight_traces: Tuple[Tuple[TraceStep, ...], ...] = ()

    @property
    def statement(self) -> str:
        return BOUND_RULES[self.rule]

    def __str__(self):
        rel = ">=" if self.side == LOWER else "<="
        v = "inf" if self.value == INF else int(self.value)
        prem = ", ".join(f"{p.source}={p.value if p.value == INF else int(p.value)}" for p in self.premises)
        s = f"[{self.rule}] {self.invariant} {rel} {v}"
        if prem:
            s += f"  from {prem}"
        if self.note:
            s += f"  ({self.note})"
        return s


_COMBINE: Dict[str, Callable[[List[float]], float]] = {
    "order": lambda p: p[0],
    "cat1-le-cat": lambda p: p[0],
    "xi-zero": lambda p: p[0],
    "dimension": lambda p: p[0],
    "product": lambda p: p[0] + p[1] - 1,
    "cwgt-pairing": lambda p: p[0] + p[1] + 1,
    "obstruction": lambda p: p[0] + p[1] + 1,
    "obstruction-xi-zero": lambda p: p[0] + p[1] + 1,
}


def _ccat_connected(step: BoundStep) -> float:
    return step.premises[0].value + (-1 if step.side == UPPER else 1)


@dataclass
class BoundLedger:
    name: str
    dim: Optional[int] = None
    connected: bool = True
    xi_nonzero: Optional[bool] = None
    lower: Dict[str, BoundStep] = field(default_factory=dict)
    upper: Dict[str, BoundStep] = field(default_factory=dict)
    history: List[BoundStep] = field(default_factory=list)

    # -- access

    def best(self, inv: str, side: str) -> Optional[float]:
        step = (self.lower if side == LOWER else self.upper).get(inv)
        return None if step is None else step.value

    def interval(self, inv: str) -> Tuple[Optional[float], Optional[float]]:
        return self.best(inv, LOWER), self.best(inv, UPPER)

    def closed(self, inv: str) -> bool:
        lo, hi = self.interval(inv)
        return lo is not None and lo == hi

    def value(self, inv: str) -> Optional[int]:
        return int(self.best(inv, LOWER)) if self.closed(inv) else None

    def premise(self, inv: str, side: str) -> Premise:
        return Premise(f"{self.name}:{inv}:{side}", self.best(inv, side))

    # -- recording

    def record(self, step: BoundStep) -> bool:
        if step.invariant not in INVARIANTS:
            raise BoundError(f"unknown invariant {step.invariant!r}")
        table = self.lower if step.side == LOWER else self.upper
        old = table.get(step.invariant)
        better = old is None or (step.value > old.value if step.side == LOWER else step.value < old.value)
        if better:
            table[step.invariant] = step
            self.history.append(step)
        return better

    def declare(self, inv: str, value: int, note: str = "", side: Optional[str] = None) -> None:
        for s in ((LOWER, UPPER) if side is None else (side,)):
            self.record(BoundStep("declared", inv, s, value, (), note))

    # -- unary rules

    def _derive(self, rule: str, inv: str, side: str, premises: Sequence[Premise], note: str = "") -> bool:
        if any(p.value is None for p in premises):
            return False
        if rule == "ccat1-connected":
            val = premises[0].value + (-1 if side == UPPER else 1)
        else:
            val = _COMBINE[rule]([p.value for p in premises])
        return self.record(BoundStep(rule, inv, side, val, tuple(premises), note))

    def saturate(self) -> None:
        for _ in range(20):
            ch = False
            for a, b in zip(CHAIN, CHAIN[1:]):
                ch |= self._derive("order", b, LOWER, [self.premise(a, LOWER)])
                ch |= self._derive("order", a, UPPER, [self.premise(b, UPPER)])
            ch |= self._derive("cat1-le-cat", "cat1", UPPER, [self.premise("cat", UPPER)])
            ch |= self._derive("cat1-le-cat", "cat", LOWER, [self.premise("cat1", LOWER)])
            if self.xi_nonzero and self.connected:
                ch |= self._derive("ccat1-connected", "ccat1", UPPER, [self.premise("cat", UPPER)])
                ch |= self._derive("ccat1-connected", "cat", LOWER, [self.premise("ccat1", LOWER)])
                if self.dim is not None:
                    ch |= self._derive("dimension", "cat1", UPPER, [Premise("dim", self.dim)],
                                       "connectivity assumed for the dimension rule")
            if self.xi_nonzero is False:
                for inv in CHAIN:
                    for side in (LOWER, UPPER):
                        ch |= self._derive("xi-zero", inv, side, [self.premise("cat", side)])
                        ch |= self._derive("xi-zero", "cat", side, [self.premise(inv, side)])
            if not ch:
                return
        raise BoundError("bound saturation did not converge")

    # -- checks

    def violations(self) -> List[str]:
        out = []
        for inv in INVARIANTS:
            lo, hi = self.interval(inv)
            if lo is not None and hi is not None and lo > hi:
                out.append(f"{self.name}: {inv} has lower bound {lo} above upper bound {hi}")
        for a, b in zip(CHAIN, CHAIN[1:]):
            lo, hi = self.best(a, LOWER), self.best(b, UPPER)
            if lo is not None and hi is not None and lo > hi:
                out.append(f"{self.name}: {a} >= {lo} contradicts {b} <= {hi}")
        return out

    def coherent(self) -> bool:
        return not self.violations()

    def steps(self) -> List[BoundStep]:
        return [s for t in (self.lower, self.upper) for s in t.values()]


def replay(step: BoundStep, ledgers: Dict[str, BoundLedger] | None = None,
           facts: Sequence[WeightFact] = ()) -> bool:
    """Recompute a step from its premises; premises naming a known ledger must match its history.

    ``facts`` are the declared weight facts that the step's weight traces may cite.
    """
    if step.rule == "declared":
        return True
    if step.rule not in BOUND_RULES:
        return False
    vals = [p.value for p in step.premises]
    if step.rule == "ccat1-connected":
        if step.value != _ccat_connected(step):
            return False
    elif step.value != _COMBINE[step.rule](vals):
        return False
    if ledgers:
        for p in step.premises:
            parts = p.source.split(":")
            if len(parts) == 3 and parts[0] in ledgers:
                led = ledgers[parts[0]]
                if not any(h.invariant == parts[1] and h.side == parts[2] and h.value == p.value
                           for h in led.history):
                    return False
    for tr in step.weight_traces:
        if not replay_trace(tr, facts):
            return False
    return True


# ---------------------------------------------------------------------------
# lower bounds from pairings


@dataclass(frozen=True)
class PairingDeclaration:
    """A declared nonzero evaluation <u, z>."""
    u: ClassExpr
    z: ClassExpr
    nonzero: bool = True


def _weight(facts, e) -> WeightFact:
    return propagate_weights(facts, e)


def cat_lower_bound(pairing: PairingDeclaration, facts: Sequence[WeightFact],
                    ledger: Optional[BoundLedger] = None) -> BoundStep:
    if not pairing.nonzero:
        raise BoundError("the pairing must be nonzero")
    wz, wu = _weight(facts, pairing.z), _weight(facts, pairing.u)
    if wz.value == INF or wu.value == INF:
        raise BoundError("a nonzero pairing cannot involve the zero class")
    step = BoundStep("cwgt-pairing", "cat", LOWER, wz.value + wu.value + 1,
                     (Premise(f"cwgt:{pairing.z}", wz.value), Premise(f"cwgt:{pairing.u}", wu.value)),
                     weight_traces=(wz.trace, wu.trace))
    if ledger is not None:
        ledger.record(step)
    return step


def point_class_weight(z: Atom, ledger: BoundLedger) -> WeightFact:
    """For a zero-dimensional class on a path-connected space, cwgt(z) = cat(X) - 1."""
    sig = signature(z)
    if not (sig.homology and sig.degree == 0 and sig.space.connected):
        raise BoundError(f"{z} is not a zero-dimensional class on a connected space")
    if not ledger.closed("cat"):
        raise BoundError(f"cat({ledger.name}) is not known exactly")
    v = ledger.value("cat") - 1
    step = TraceStep("declared", (), Claim(z, CWGT_EXACT, v))
    return WeightFact(z, CWGT_EXACT, v, (step,))


@dataclass(frozen=True)
class ObstructionPairing:
    """Nonzero pairing <u cup u_1 ... u_k, z> in a flat bundle, as verified by the movability module."""
    z: ClassExpr
    k: int
    image_nonzero: bool
    algebraic_integer: Optional[bool]
    witness: object = None


def cat1_lower_bound(obstr: ObstructionPairing, zfact: WeightFact,
                     ledger: Optional[BoundLedger] = None, xi_zero: bool = False) -> BoundStep:
    if not obstr.image_nonzero:
        raise BoundError("the pairing vanishes")
    if obstr.algebraic_integer is None:
        raise BoundError("the bundle could not be classified")
    if obstr.algebraic_integer:
        raise RejectedBundle("the bundle is a xi-algebraic integer")
    if zfact.subject != obstr.z:
        raise BoundError("the weight fact is about a different class")
    if obstr.k < 0:
        raise BoundError("k must be nonnegative")
    rule, inv = ("obstruction-xi-zero", "cat") if xi_zero else ("obstruction", "cat1")
    step = BoundStep(rule, inv, LOWER, zfact.value + obstr.k + 1,
                     (Premise(f"cwgt:{obstr.z}", zfact.value), Premise("k", obstr.k)),
                     weight_traces=(zfact.trace,))
    if ledger is not None:
        ledger.record(step)
    return step


def ccat1_upper_bounds(X: BoundLedger, Y: BoundLedger, name: Optional[str] = None) -> BoundLedger:
    """Ledger for X x Y carrying the product upper bound for ccat^1."""
    ux, uy = X.best("ccat1", UPPER), Y.best("ccat1", UPPER)
    if ux is None or uy is None:
        raise BoundError("both factors need an upper bound for ccat^1")
    lx, ly = X.best("ccat1", LOWER), Y.best("ccat1", LOWER)
    if not ((lx is not None and lx > 0) or (ly is not None and ly > 0)):
        raise ProductHypothesis("neither factor is known to have ccat^1 > 0")
    dim = None if X.dim is None or Y.dim is None else X.dim + Y.dim
    xi = None if X.xi_nonzero is None or Y.xi_nonzero is None else (X.xi_nonzero or Y.xi_nonzero)
    P = BoundLedger(name or f"{X.name}x{Y.name}", dim, X.connected and Y.connected, xi)
    posi = X.premise("ccat1", LOWER) if lx is not None and lx > 0 else Y.premise("ccat1", LOWER)
    P.record(BoundStep("product", "ccat1", UPPER, ux + uy - 1,
                       (X.premise("ccat1", UPPER), Y.premise("ccat1", UPPER)),
                       f"positivity from {posi.source} = {int(posi.value)}"))
    return P
