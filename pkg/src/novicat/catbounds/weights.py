"""Forward-chaining engine for category weights of classes.

State maps ``(expression, kind)`` to the best known value together with the
step that produced it.  Kinds are ``cwgt-lower``, ``swgt-lower`` and
``cwgt-exact``.  Rules only ever raise lower bounds, so saturation
terminates; every step records its rule and premises and can be replayed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .expr import Atom, Cap, ClassExpr, Cross, Dual, IllTyped, Push, WedgeSum, flatten_cross, signature, subexpressions

INF = math.inf

CWGT_LOWER = "cwgt-lower"
SWGT_LOWER = "swgt-lower"
CWGT_EXACT = "cwgt-exact"
KINDS = (CWGT_LOWER, SWGT_LOWER, CWGT_EXACT)

RULES: Dict[str, str] = {
    "declared": "fact supplied with the input",
    "default": "cwgt(z) >= 0 for every class",
    "R-zero": "the zero class has category weight +inf",
    "R-posdeg": "swgt(u) >= 1 for a cohomology class of positive degree",
    "R-swgt": "swgt(u) <= cwgt(u)",
    "R-exact": "an exact value is also a lower bound",
    "R-cap": "cwgt(u cap z) >= cwgt(u) + cwgt(z)",
    "R-cross": "swgt(z1 x z2) >= swgt(z1) + swgt(z2) on closed orientable manifolds",
    "R-kprod": "cwgt(z1 x ... x zk) >= k when each zi has degree below the dimension of its closed orientable manifold",
    "R-wedge": "cwgt(z1 + z2) = min(cwgt(z1), cwgt(z2)) on a wedge",
    "R-push": "cwgt(f_*(z)) >= cwgt(z) for a coefficient morphism f",
    "R-dual": "cwgt(z) = cwgt(u) for Poincare dual classes on a closed manifold",
    "R-dual-swgt": "swgt of a homology class on a closed manifold is swgt of its dual",
}


def _fmt(v) -> str:
    return "inf" if v == INF else str(int(v))


@dataclass(frozen=True)
class Claim:
    subject: ClassExpr
    kind: str
    value: float

    def __str__(self):
        rel = "=" if self.kind == CWGT_EXACT else ">="
        name = "swgt" if self.kind == SWGT_LOWER else "cwgt"
        return f"{name}({self.subject}) {rel} {_fmt(self.value)}"


@dataclass(frozen=True)
class TraceStep:
    rule: str
    premises: Tuple[Claim, ...]
    conclusion: Claim

    @property
    def statement(self) -> str:
        return RULES[self.rule]

    def __str__(self):
        prem = "; ".join(map(str, self.premises))
        return f"[{self.rule}] {self.conclusion}" + (f"  <=  {prem}" if prem else "")


@dataclass(frozen=True)
class WeightFact:
    subject: ClassExpr
    kind: str
    value: float
    trace: Tuple[TraceStep, ...] = ()

    def __str__(self):
        return str(Claim(self.subject, self.kind, self.value))


def _is_zero_class(e: ClassExpr) -> bool:
    return isinstance(e, Atom) and e.zero


class WeightEngine:
    def __init__(self, facts: Iterable[WeightFact] = ()):
        self.facts = list(facts)
        self.state: Dict[Tuple[ClassExpr, str], TraceStep] = {}

    def value(self, e: ClassExpr, kind: str) -> Optional[float]:
        step = self.state.get((e, kind))
        return None if step is None else step.conclusion.value

    def _claim(self, e: ClassExpr, kind: str) -> Claim:
        return self.state[(e, kind)].conclusion

    def _offer(self, rule: str, e: ClassExpr, kind: str, value: float, premises: Sequence[Claim] = ()) -> bool:
        key = (e, kind)
        old = self.state.get(key)
        if kind == CWGT_EXACT:
            if old is not None:
                if old.conclusion.value != value:
                    raise ValueError(f"inconsistent exact weights for {e}: {_fmt(old.conclusion.value)} vs {_fmt(value)}")
                return False
        elif old is not None and old.conclusion.value >= value:
            return False
        self.state[key] = TraceStep(rule, tuple(premises), Claim(e, kind, value))
        return True

    def _lower(self, e: ClassExpr) -> Claim:
        return self._claim(e, CWGT_LOWER)

    def saturate(self, target: ClassExpr, max_rounds: int = 100) -> None:
        exprs = subexpressions(target)
        for f in self.facts:
            for x in subexpressions(f.subject):
                if x not in exprs:
                    exprs.append(x)
        for f in self.facts:
            self._offer("declared", f.subject, f.kind, f.value)
        for e in exprs:
            self._offer("default", e, CWGT_LOWER, 0)
        for _ in range(max_rounds):
            changed = False
            for e in exprs:
                changed |= self._apply(e)
            if not changed:
                return
        raise RuntimeError("weight saturation did not converge")

    def _apply(self, e: ClassExpr) -> bool:
        ch = False
        sig = signature(e)
        if _is_zero_class(e):
            ch |= self._offer("R-zero", e, CWGT_EXACT, INF)
        exact = self.value(e, CWGT_EXACT)
        if exact is not None:
            ch |= self._offer("R-exact", e, CWGT_LOWER, exact, [self._claim(e, CWGT_EXACT)])
        if not sig.homology and sig.degree > 0 and not _is_zero_class(e):
            ch |= self._offer("R-posdeg", e, SWGT_LOWER, 1)
        sw = self.value(e, SWGT_LOWER)
        if sw is not None:
            ch |= self._offer("R-swgt", e, CWGT_LOWER, sw, [self._claim(e, SWGT_LOWER)])
        if isinstance(e, Cap):
            ch |= self._offer("R-cap", e, CWGT_LOWER, self.value(e.u, CWGT_LOWER) + self.value(e.z, CWGT_LOWER),
                              [self._lower(e.u), self._lower(e.z)])
        elif isinstance(e, Cross):
            sp = [signature(f).space for f in e.factors]
            if all(s.closed_manifold and s.orientable for s in sp):
                vals = [self.value(f, SWGT_LOWER) for f in e.factors]
                if all(v is not None for v in vals):
                    ch |= self._offer("R-cross", e, SWGT_LOWER, sum(vals),
                                      [self._claim(f, SWGT_LOWER) for f in e.factors])
                flat = flatten_cross(e)
                fs = [signature(f) for f in flat]
                if all(s.homology and s.space.closed_manifold and s.space.orientable and s.space.dim is not None
                       and s.degree < s.space.dim for s in fs):
                    ch |= self._offer("R-kprod", e, CWGT_LOWER, len(flat))
        elif isinstance(e, WedgeSum):
            a, b = self.value(e.left, CWGT_LOWER), self.value(e.right, CWGT_LOWER)
            ch |= self._offer("R-wedge", e, CWGT_LOWER, min(a, b), [self._lower(e.left), self._lower(e.right)])
            ea, eb = self.value(e.left, CWGT_EXACT), self.value(e.right, CWGT_EXACT)
            if ea is not None and eb is not None:
                ch |= self._offer("R-wedge", e, CWGT_EXACT, min(ea, eb),
                                  [self._claim(e.left, CWGT_EXACT), self._claim(e.right, CWGT_EXACT)])
        elif isinstance(e, Push):
            ch |= self._offer("R-push", e, CWGT_LOWER, self.value(e.z, CWGT_LOWER), [self._lower(e.z)])
        if isinstance(e, Dual) or (sig.space.closed_manifold and sig.space.dim is not None and not isinstance(e, Dual)):
            other = e.z if isinstance(e, Dual) else Dual(e)
            if isinstance(e, Dual) and isinstance(e.z, Dual):
                return ch
            if (other, CWGT_LOWER) in self.state:
                ch |= self._offer("R-dual", e, CWGT_LOWER, self.value(other, CWGT_LOWER), [self._lower(other)])
            if (other, CWGT_EXACT) in self.state:
                ch |= self._offer("R-dual", e, CWGT_EXACT, self.value(other, CWGT_EXACT),
                                  [self._claim(other, CWGT_EXACT)])
            if sig.homology and (other, SWGT_LOWER) in self.state:
                ch |= self._offer("R-dual-swgt", e, SWGT_LOWER, self.value(other, SWGT_LOWER),
                                  [self._claim(other, SWGT_LOWER)])
        return ch

    def trace_for(self, e: ClassExpr, kind: str) -> Tuple[TraceStep, ...]:
        """Steps needed for the claim, premises first."""
        out: List[TraceStep] = []
        seen = set()

        def visit(key):
            if key in seen or key not in self.state:
                return
            seen.add(key)
            step = self.state[key]
            for p in step.premises:
                visit((p.subject, p.kind))
            out.append(step)

        visit((e, kind))
        return tuple(out)


def propagate_weights(facts: Iterable[WeightFact], expr: ClassExpr) -> WeightFact:
    """Best derivable category weight of expr: the exact value when known, else the best lower bound."""
    signature(expr)
    eng = WeightEngine(facts)
    eng.saturate(expr)
    exact = eng.value(expr, CWGT_EXACT)
    if exact is not None:
        return WeightFact(expr, CWGT_EXACT, exact, eng.trace_for(expr, CWGT_EXACT))
    return WeightFact(expr, CWGT_LOWER, eng.value(expr, CWGT_LOWER), eng.trace_for(expr, CWGT_LOWER))


def strict_weight(facts: Iterable[WeightFact], expr: ClassExpr) -> Optional[WeightFact]:
    eng = WeightEngine(facts)
    eng.saturate(expr)
    v = eng.value(expr, SWGT_LOWER)
    if v is None:
        return None
    return WeightFact(expr, SWGT_LOWER, v, eng.trace_for(expr, SWGT_LOWER))


def replay_step(step: TraceStep, facts: Iterable[WeightFact] = ()) -> bool:
    """Re-derive a step's conclusion from its premises and its rule alone."""
    c = step.conclusion
    prem = [p.value for p in step.premises]
    e = c.subject
    try:
        sig = signature(e)
    except IllTyped:
        return False
    r = step.rule
    if r == "declared":
        return any(f.subject == e and f.kind == c.kind and f.value == c.value for f in facts)
    if r == "default":
        return c.kind == CWGT_LOWER and c.value == 0
    if r == "R-zero":
        return _is_zero_class(e) and c.value == INF
    if r == "R-posdeg":
        return not sig.homology and sig.degree > 0 and c.kind == SWGT_LOWER and c.value == 1
    if r in ("R-swgt", "R-exact"):
        want = SWGT_LOWER if r == "R-swgt" else CWGT_EXACT
        return (len(step.premises) == 1 and step.premises[0].subject == e and step.premises[0].kind == want
                and c.kind == CWGT_LOWER and c.value == prem[0])
    if r == "R-cap":
        return isinstance(e, Cap) and [p.subject for p in step.premises] == [e.u, e.z] and c.value == sum(prem)
    if r == "R-cross":
        return (isinstance(e, Cross) and [p.subject for p in step.premises] == list(e.factors)
                and all(p.kind == SWGT_LOWER for p in step.premises) and c.value == sum(prem))
    if r == "R-kprod":
        flat = flatten_cross(e)
        fs = [signature(f) for f in flat]
        return (isinstance(e, Cross) and c.value == len(flat)
                and all(s.homology and s.space.closed_manifold and s.space.orientable and s.degree < s.space.dim
                        for s in fs))
    if r == "R-wedge":
        return isinstance(e, WedgeSum) and c.value == min(prem)
    if r == "R-push":
        return isinstance(e, Push) and step.premises[0].subject == e.z and c.value == prem[0]
    if r in ("R-dual", "R-dual-swgt"):
        p = step.premises[0].subject
        linked = (isinstance(e, Dual) and e.z == p) or (isinstance(p, Dual) and p.z == e)
        return linked and sig.space.closed_manifold and c.value == prem[0]
    return False


def replay_trace(trace: Sequence[TraceStep], facts: Iterable[WeightFact] = ()) -> bool:
    facts = list(facts)
    return all(replay_step(s, facts) for s in trace)
