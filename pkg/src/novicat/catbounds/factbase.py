"""Text format for spaces, classes and weight facts.

::

    space S dim=2 closed connected            # flags: closed, nonorientable, disconnected
    atom z homology 1 S                       # optional: coeffs=Z2, zero
    atom u cohomology 1 S
    fact cwgt-exact dual(z) 1
    query cross(z, z)
    pairing u z                               # declared nonzero <u, z>
    obstruction z k=1 bundle=generic          # bundle=generic | algebraic-integer
    ledger S cat=3 xi=nonzero                 # ledger for cat bounds: dim/connected come from the space
"""
from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..complexes import InputError
from .expr import Atom, ClassExpr, IllTyped, Space, parse_expr
from .ledger import (
    BoundLedger, BoundStep, ObstructionPairing, PairingDeclaration, cat1_lower_bound, cat_lower_bound,
)
from .weights import INF, KINDS, WeightFact, propagate_weights

_SPACE_FLAGS = {"closed", "nonorientable", "orientable", "connected", "disconnected"}


@dataclass
class FactBase:
    spaces: Dict[str, Space] = field(default_factory=dict)
    atoms: Dict[str, Atom] = field(default_factory=dict)
    facts: List[WeightFact] = field(default_factory=list)
    queries: List[ClassExpr] = field(default_factory=list)
    pairings: List[PairingDeclaration] = field(default_factory=list)
    obstructions: List[ObstructionPairing] = field(default_factory=list)
    ledger: Optional[Tuple[str, Dict[str, str]]] = None


def _value(tok: str, line: int, col: int) -> float:
    if tok.lower() in ("inf", "+inf"):
        return INF
    try:
        v = int(tok)
    except ValueError:
        raise InputError(f"expected an integer or inf, got {tok!r}", line, col) from None
    if v < 0:
        raise InputError("weights are nonnegative", line, col)
    return v


def _split_expr_tail(rest: str, n_tail: int) -> Tuple[str, List[str]]:
    """Split off the last n_tail whitespace-separated tokens; the expression may contain spaces."""
    parts = rest.rsplit(None, n_tail) if n_tail else [rest]
    return parts[0], parts[1:]


def parse_factbase(text: str) -> FactBase:
    fb = FactBase()
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        col0 = len(line) - len(line.lstrip()) + 1
        head, _, rest = line.strip().partition(" ")
        rest = rest.strip()
        rest_col = line.find(rest, col0 - 1 + len(head)) + 1 if rest else len(line) + 1
        try:
            if head == "space":
                toks = shlex.split(rest)
                if not toks:
                    raise InputError("space needs a name", ln, rest_col)
                name, dim, flags = toks[0], None, set()
                for t in toks[1:]:
                    if t.startswith("dim="):
                        dim = int(t[4:])
                    elif t in _SPACE_FLAGS:
                        flags.add(t)
                    else:
                        raise InputError(f"unknown space attribute {t!r}", ln, line.find(t) + 1)
                fb.spaces[name] = Space(name, dim, "closed" in flags, "nonorientable" not in flags,
                                        "disconnected" not in flags)
            elif head == "atom":
                toks = rest.split()
                if len(toks) < 4:
                    raise InputError("atom needs: name homology|cohomology degree space", ln, rest_col)
                name, variance, deg, sp = toks[:4]
                if variance not in ("homology", "cohomology"):
                    raise InputError(f"expected homology or cohomology, got {variance!r}", ln, line.find(variance) + 1)
                if sp not in fb.spaces:
                    raise InputError(f"unknown space {sp!r}", ln, line.find(sp, line.find(deg)) + 1)
                coeffs, zero = "Z", False
                for t in toks[4:]:
                    if t.startswith("coeffs="):
                        coeffs = t[7:]
                    elif t == "zero":
                        zero = True
                    else:
                        raise InputError(f"unknown atom attribute {t!r}", ln, line.find(t) + 1)
                atom = Atom(name, int(deg), variance == "homology", fb.spaces[sp], coeffs, zero)
                fb.atoms[name] = atom
            elif head == "fact":
                kind, _, tail = rest.partition(" ")
                if kind not in KINDS:
                    raise InputError(f"unknown fact kind {kind!r}", ln, rest_col)
                expr_text, (val,) = _split_expr_tail(tail.strip(), 1)
                fb.facts.append(WeightFact(parse_expr(expr_text, fb.atoms), kind,
                                           _value(val, ln, line.rfind(val) + 1)))
            elif head == "query":
                fb.queries.append(parse_expr(rest, fb.atoms))
            elif head == "pairing":
                u_text, (z_text,) = _split_expr_tail(rest, 1)
                fb.pairings.append(PairingDeclaration(parse_expr(u_text, fb.atoms), parse_expr(z_text, fb.atoms)))
            elif head == "obstruction":
                toks = rest.split()
                opts = dict(t.split("=", 1) for t in toks if "=" in t)
                expr_text = " ".join(t for t in toks if "=" not in t)
                bundle = opts.get("bundle", "generic")
                if bundle not in ("generic", "algebraic-integer"):
                    raise InputError(f"unknown bundle {bundle!r}", ln, line.find(bundle) + 1)
                fb.obstructions.append(ObstructionPairing(parse_expr(expr_text, fb.atoms), int(opts.get("k", 0)),
                                                          True, bundle == "algebraic-integer"))
            elif head == "ledger":
                toks = rest.split()
                if not toks or toks[0] not in fb.spaces:
                    raise InputError("ledger needs a declared space", ln, rest_col)
                fb.ledger = (toks[0], dict(t.split("=", 1) for t in toks[1:]))
            else:
                raise InputError(f"unknown directive {head!r}", ln, col0)
        except IllTyped as exc:
            raise InputError(str(exc), ln, rest_col) from None
        except ValueError as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(str(exc), ln, rest_col) from None
    return fb


@dataclass
class FactBaseResult:
    weights: List[WeightFact]
    ledger: Optional[BoundLedger]
    steps: List[BoundStep]


def run_factbase(fb: FactBase) -> FactBaseResult:
    weights = [propagate_weights(fb.facts, q) for q in fb.queries]
    ledger = None
    steps: List[BoundStep] = []
    if fb.ledger is not None:
        name, opts = fb.ledger
        sp = fb.spaces[name]
        xi = opts.get("xi")
        ledger = BoundLedger(name, sp.dim, sp.connected,
                             None if xi is None else xi in ("nonzero", "nz", "1"))
        for inv in ("cat", "cat_xi", "cat1", "ccat1"):
            if inv in opts:
                ledger.declare(inv, int(opts[inv]), "declared in the fact base")
    for p in fb.pairings:
        steps.append(cat_lower_bound(p, fb.facts, ledger))
    for ob in fb.obstructions:
        zf = propagate_weights(fb.facts, ob.z)
        xi_zero = ledger is not None and ledger.xi_nonzero is False
        steps.append(cat1_lower_bound(ob, zf, ledger, xi_zero=xi_zero))
    if ledger is not None:
        ledger.saturate()
    return FactBaseResult(weights, ledger, steps)
