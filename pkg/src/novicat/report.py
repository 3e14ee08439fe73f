"""Machine-readable reports and their independent re-verification.

A report is a single JSON document.  Rationals are ``"p/q"`` strings and
exponent vectors are integer arrays, so every certificate survives a round
trip exactly.  ``verify_report`` rebuilds each certificate from the report
and the original input and re-checks it without trusting the code path that
produced it.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .catbounds.expr import parse_expr
from .catbounds.ledger import BoundLedger, BoundStep, Premise, replay
from .catbounds.weights import INF, Claim, TraceStep, WeightFact, replay_step
from .complexes import (
    CycleVector, EquivariantChainComplex, chain_from_json, chain_to_json, poly_from_json, poly_to_json,
)
from .exactalg.linalg import FracScalar
from .groupring import LaurentPoly, SignPolicy, XiOrder, format_poly, in_S_xi
from .movability import (
    FieldVerdict, MonodromyPoint, MovabilityVerdict, Outcome, PairingWitness, is_xi_algebraic_integer,
    verify_field_certificate, verify_pairing, verify_verdict,
)
from .novikov import DegreeBlock, DiagonalizedComplex, NovikovSeries, chain_spread, check_diagonalization

SCHEMA = "novicat.report/1"


def digest(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode()
    return hashlib.sha256(data).hexdigest()


def rat(x) -> Optional[str]:
    if x is None:
        return None
    return str(Fraction(x))


def dumps(report: Dict[str, Any]) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def without_timing(report: Dict[str, Any]) -> Dict[str, Any]:
    return {k: v for k, v in report.items() if k != "timing"}


def new_report(command: str, job: Dict[str, Any], input_info: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    return {"schema": SCHEMA, "tool": {"name": "novicat", "version": __version__}, "command": command,
            "job": job, "input": input_info, "results": []}


# ---------------------------------------------------------------------------
# encoders


def frac_to_json(x: FracScalar):
    return {"num": poly_to_json(x.num), "den": poly_to_json(x.den)}


def frac_from_json(d, rank: int) -> FracScalar:
    return FracScalar(poly_from_json(d["num"], rank), poly_from_json(d["den"], rank))


def witness_to_json(w: Optional[PairingWitness]):
    if w is None:
        return None
    return {"cocycle": [frac_to_json(x) for x in w.cocycle], "value": frac_to_json(w.value),
            "monodromy": w.monodromy.as_strings(), "degree": w.cycle.degree}


def witness_from_json(d, z: CycleVector) -> PairingWitness:
    mono = MonodromyPoint.parse(" ".join(d["monodromy"]))
    r = z.coords[0].rank if z.coords else 0
    rank = r if mono.is_generic() else 0
    return PairingWitness(tuple(frac_from_json(x, rank) for x in d["cocycle"]), z,
                          frac_from_json(d["value"], rank), mono)


def verdict_to_json(v: MovabilityVerdict) -> Dict[str, Any]:
    return {
        "kind": "movability",
        "outcome": v.outcome.value,
        "ring": v.ring,
        "delta": None if v.delta is None else poly_to_json(v.delta),
        "delta_text": None if v.delta is None else format_poly(v.delta),
        "chain": None if v.chain is None else chain_to_json(v.chain),
        "d": v.d,
        "witness": witness_to_json(v.witness),
        "box": v.box,
        "policy": v.policy.value,
        "annihilator": None if v.annihilator is None else [format_poly(g) for g in v.annihilator],
        "notes": list(v.notes),
    }


def verdict_from_json(d, C: EquivariantChainComplex, z: CycleVector) -> MovabilityVerdict:
    r = C.rank
    return MovabilityVerdict(
        Outcome(d["outcome"]), d["ring"],
        None if d["delta"] is None else poly_from_json(d["delta"], r),
        None if d["chain"] is None else chain_from_json(d["chain"], r),
        d["d"], None if d["witness"] is None else witness_from_json(d["witness"], z),
        d["box"], None, SignPolicy(d["policy"]),
    )


def field_to_json(v: FieldVerdict) -> Dict[str, Any]:
    return {
        "kind": "field-movability",
        "movable": v.movable,
        "x": None if v.x is None else poly_to_json(v.x),
        "x_text": None if v.x is None else format_poly(v.x),
        "chain": None if v.chain is None else chain_to_json(v.chain),
        "witness": witness_to_json(v.witness),
    }


def series_to_json(s: NovikovSeries):
    return {"body": poly_to_json(s.body), "cutoff": rat(s.cutoff)}


def series_from_json(d, xi: XiOrder) -> NovikovSeries:
    cut = None if d["cutoff"] is None else Fraction(d["cutoff"])
    return NovikovSeries(poly_from_json(d["body"], xi.rank), cut, xi)


def diag_to_json(D: DiagonalizedComplex) -> Dict[str, Any]:
    return {
        "kind": "diagonalization",
        "cutoff": rat(D.cutoff),
        "complete": D.complete,
        "notes": list(D.notes),
        "blocks": {str(q): {"row_offset": b.row_offset, "diagonal": [series_to_json(x) for x in b.diagonal],
                            "diagonal_text": [str(x) for x in b.diagonal]}
                   for q, b in sorted(D.blocks.items())},
        "mu": {str(q): b.mu for q, b in sorted(D.blocks.items())},
        "basis": {str(q): [[series_to_json(x) for x in row] for row in M] for q, M in sorted(D.basis.items())},
        "inverse": {str(q): [[series_to_json(x) for x in row] for row in M] for q, M in sorted(D.inverse.items())},
    }


def diag_from_json(d, xi: XiOrder) -> DiagonalizedComplex:
    mat = lambda M: [[series_from_json(x, xi) for x in row] for row in M]
    blocks = {int(q): DegreeBlock(int(q), b["row_offset"], [series_from_json(x, xi) for x in b["diagonal"]])
              for q, b in d["blocks"].items()}
    return DiagonalizedComplex(xi, Fraction(d["cutoff"]), blocks,
                               {int(q): mat(M) for q, M in d["basis"].items()},
                               {int(q): mat(M) for q, M in d["inverse"].items()}, d["complete"], list(d["notes"]))


# ---------------------------------------------------------------------------
# verification


def _check_movability(res, C, z) -> List[str]:
    v = verdict_from_json(res, C, z)
    return [] if verify_verdict(C, z, v) else [f"movability certificate ({v.outcome.value}) does not verify"]


def _check_field(res, C, z) -> List[str]:
    r = C.rank
    if res["movable"]:
        x = poly_from_json(res["x"], r)
        ok = verify_field_certificate(C, z, x, chain_from_json(res["chain"], r))
    else:
        ok = res["witness"] is not None and verify_pairing(C, witness_from_json(res["witness"], z))
    return [] if ok else ["field certificate does not verify"]


def _check_pairing(res, C, z) -> List[str]:
    out = []
    mono = MonodromyPoint.parse(" ".join(res["monodromy"]))
    if res["witness"] is not None and not verify_pairing(C, witness_from_json(res["witness"], z)):
        out.append("pairing witness does not verify")
    if res["image_nonzero"] != (res["witness"] is not None):
        out.append("pairing flag disagrees with the witness")
    if res["algebraic_integer"] is not None and res["algebraic_integer"] != is_xi_algebraic_integer(mono, C.xi):
        out.append("algebraic-integer flag is wrong")
    if res["not_movable"] and (not res["image_nonzero"] or res["algebraic_integer"] is not False):
        out.append("NotMovable conclusion is not supported by the pairing")
    return out


def _check_diag(res, C, z) -> List[str]:
    D = diag_from_json(res, C.xi)
    return [] if check_diagonalization(C, D) else ["diagonalization does not verify"]


def _check_chain(res, C, z) -> List[str]:
    r = C.rank
    xi = C.xi
    out = []
    delta = poly_from_json(res["delta"], r)
    c1 = chain_from_json(res["c1"], r)
    chain = chain_from_json(res["chain"], r)
    M = C.boundary(z.degree + 1)
    if not in_S_xi(delta, xi) or M.apply(list(c1)) != [delta * c for c in z.coords]:
        out.append("c1 is not a bounding chain for delta * z")
    s = chain_spread(C, c1, z.degree)
    if Fraction(res["spread"]) != s:
        out.append(f"recorded spread {res['spread']} differs from {s}")
    tau = Fraction(res["cutoff"])
    resid = [a - b for a, b in zip(M.apply(list(chain)), z.coords)]
    for p in resid:
        for e in p.support():
            if xi.first(e) < tau - s:
                out.append(f"residual term at {list(e)} lies below {tau - s}")
    return out


CHECKS = {
    "movability": _check_movability,
    "field-movability": _check_field,
    "pairing": _check_pairing,
    "diagonalization": _check_diag,
    "chain": _check_chain,
}


def verify_complex_results(report, C: EquivariantChainComplex, z: CycleVector) -> List[str]:
    out = []
    for i, res in enumerate(report["results"]):
        check = CHECKS.get(res.get("kind"))
        if check is None:
            out.append(f"result {i}: unknown kind {res.get('kind')!r}")
            continue
        try:
            out.extend(f"result {i}: {m}" for m in check(res, C, z))
        except (KeyError, TypeError, ValueError, ArithmeticError) as exc:
            out.append(f"result {i}: malformed certificate ({exc})")
    return out


# ---------------------------------------------------------------------------
# weights and ledgers


def weight_value(v):
    return "inf" if v == INF else int(v)


def _value_from(v):
    return INF if v == "inf" else v


def claim_to_json(c: Claim):
    return {"subject": str(c.subject), "kind": c.kind, "value": weight_value(c.value)}


def claim_from_json(d, atoms) -> Claim:
    return Claim(parse_expr(d["subject"], atoms), d["kind"], _value_from(d["value"]))


def trace_to_json(trace: Sequence[TraceStep]):
    return [{"rule": s.rule, "statement": s.statement, "premises": [claim_to_json(p) for p in s.premises],
             "conclusion": claim_to_json(s.conclusion)} for s in trace]


def trace_from_json(data, atoms) -> List[TraceStep]:
    return [TraceStep(d["rule"], tuple(claim_from_json(p, atoms) for p in d["premises"]),
                      claim_from_json(d["conclusion"], atoms)) for d in data]


def weight_to_json(w: WeightFact):
    return {"kind": "weight", "subject": str(w.subject), "fact": w.kind, "value": weight_value(w.value),
            "text": str(w), "trace": trace_to_json(w.trace)}


def step_to_json(s: BoundStep):
    return {"rule": s.rule, "statement": s.statement, "invariant": s.invariant, "side": s.side,
            "value": weight_value(s.value), "note": s.note, "text": str(s),
            "premises": [{"source": p.source, "value": weight_value(p.value)} for p in s.premises],
            "weight_traces": [trace_to_json(t) for t in s.weight_traces]}


def step_from_json(d, atoms) -> BoundStep:
    return BoundStep(d["rule"], d["invariant"], d["side"], _value_from(d["value"]),
                     tuple(Premise(p["source"], _value_from(p["value"])) for p in d["premises"]), d["note"],
                     tuple(tuple(trace_from_json(t, atoms)) for t in d["weight_traces"]))


def ledger_to_json(L: BoundLedger):
    return {
        "name": L.name, "dim": L.dim, "connected": L.connected, "xi_nonzero": L.xi_nonzero,
        "bounds": {inv: {"lower": None if lo is None else weight_value(lo),
                         "upper": None if hi is None else weight_value(hi)}
                   for inv in ("cat", "cat_xi", "cat1", "ccat1") for lo, hi in [L.interval(inv)]},
        "history": [step_to_json(s) for s in L.history],
    }


def ledger_from_json(d, atoms) -> BoundLedger:
    L = BoundLedger(d["name"], d["dim"], d["connected"], d["xi_nonzero"])
    for s in d["history"]:
        L.record(step_from_json(s, atoms))
    return L


def check_ledgers(data: Sequence[dict], atoms, facts: Sequence[WeightFact] = ()) -> List[str]:
    """Replay every recorded step; the rebuilt bounds must match the recorded ones and be coherent."""
    out = []
    leds = {d["name"]: ledger_from_json(d, atoms) for d in data}
    for d in data:
        L = leds[d["name"]]
        for s in L.history:
            if not replay(s, leds, facts):
                out.append(f"{L.name}: step does not replay: {s}")
        for inv, b in d["bounds"].items():
            lo, hi = L.interval(inv)
            if (None if lo is None else weight_value(lo)) != b["lower"] or \
                    (None if hi is None else weight_value(hi)) != b["upper"]:
                out.append(f"{L.name}: recorded bounds for {inv} do not match the history")
        out.extend(L.violations())
    return out


def check_weights(results: Sequence[dict], atoms, facts: Sequence[WeightFact]) -> List[str]:
    out = []
    for res in results:
        trace = trace_from_json(res["trace"], atoms)
        if not all(replay_step(s, facts) for s in trace):
            out.append(f"weight trace for {res['subject']} does not replay")
        if not trace or str(trace[-1].conclusion.subject) != res["subject"] or \
                weight_value(trace[-1].conclusion.value) != res["value"]:
            out.append(f"weight trace for {res['subject']} does not end in the reported value")
    return out
