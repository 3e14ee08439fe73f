"""Command-line front end.

Exit codes: 0 success, 1 a certificate failed to verify (or bounds did not
close), 2 bad input, 3 every verdict was inconclusive.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import fixtures as fx
from .catbounds.expr import IllTyped
from .catbounds.factbase import FactBase, parse_factbase, run_factbase
from .catbounds.ledger import BoundError, replay
from .catbounds.surfaces import (
    NotClosed, PatternError, all_patterns, parse_pattern, pattern_atoms, pushed_product, surface_products_table,
)
from .complexes import (
    CycleVector, EquivariantChainComplex, IncompatibleXi, InputError, chain_to_json, complex_to_json, parse_presentation,
    with_xi,
)
from .groupring import NotInjective, RankMismatch, SignPolicy, XiOrder, format_poly
from .movability import (
    MonodromyPoint, Outcome, UnsupportedMonodromy, decide_movable_field, decide_movable_int, evaluate_obstruction,
    verify_pairing,
)
from .novikov import CertificateError, XiMismatch, build_infinite_chain, truncated_diagonalize
from .report import (
    check_ledgers, check_weights, diag_to_json, digest, dumps, field_to_json, ledger_to_json, new_report,
    poly_to_json, rat, step_from_json, step_to_json, verdict_to_json, verify_complex_results, weight_to_json, witness_from_json,
    witness_to_json,
)

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2, 3
WORKERS_ENV = "NOVICAT_WORKERS"

COMPLEX_COMMANDS = ("movable", "field-movable", "pairing", "novikov-diag", "chain")
FACT_COMMANDS = ("weights", "catbound")


def workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# inputs


def _read(path: str) -> Tuple[str, str]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return data.decode(), digest(data)


def load_complex(job: Dict[str, Any], path: Optional[str]) -> Tuple[EquivariantChainComplex, CycleVector, Dict]:
    """Complex and cycle described by a job (an input file or a built-in fixture) plus an optional xi override."""
    xi_text = job.get("xi")
    if path is not None:
        text, sha = _read(path)
        inp = parse_presentation(text, Path(path).stem)
        xi = XiOrder.parse(xi_text, inp.projection.rank) if xi_text else None
        C = inp.complex(xi)
        if inp.cycle is None:
            raise InputError(f"{path} has no [cycle] section")
        z = inp.cycle_vector(C)
        info = {"kind": "file", "name": Path(path).name, "sha256": sha}
    else:
        name = job.get("fixture")
        if not name:
            raise InputError("give --input FILE or --fixture NAME")
        try:
            f = fx.fixture(name)
        except (KeyError, ValueError):
            raise InputError(f"unknown fixture {name!r}") from None
        C, z = f.complex, f.cycle
        if xi_text:
            C = with_xi(C, XiOrder.parse(xi_text, C.rank))
        sha = digest(f.text if f.text else json.dumps(complex_to_json(f.complex), sort_keys=True))
        info = {"kind": "fixture", "name": name, "sha256": sha}
    if not C.is_cycle(z):
        raise InputError("the given vector is not a cycle")
    return C, z, info


def load_facts(path: str) -> Tuple[FactBase, Dict]:
    text, sha = _read(path)
    return parse_factbase(text), {"kind": "file", "name": Path(path).name, "sha256": sha}


# ---------------------------------------------------------------------------
# commands


def _job(args, **extra) -> Dict[str, Any]:
    job = {"fixture": getattr(args, "fixture", None), "xi": getattr(args, "xi", None)}
    job.update(extra)
    return job


def cmd_movable(args, report):
    C, z, info = load_complex(report["job"], args.input)
    report["input"] = info
    if args.coeffs == "rat":
        report["results"].append(field_to_json(decide_movable_field(C, z)))
    else:
        v = decide_movable_int(C, z, SignPolicy(args.policy), box=args.box)
        report["results"].append(verdict_to_json(v))
    return C, z


def cmd_field(args, report):
    C, z, info = load_complex(report["job"], args.input)
    report["input"] = info
    report["results"].append(field_to_json(decide_movable_field(C, z)))
    return C, z


def cmd_pairing(args, report):
    C, z, info = load_complex(report["job"], args.input)
    report["input"] = info
    for text in report["job"]["monodromy"]:
        mono = MonodromyPoint.parse(text) if text != "generic" else MonodromyPoint.generic(C.rank)
        res = evaluate_obstruction(C, z, mono)
        report["results"].append({
            "kind": "pairing", "monodromy": mono.as_strings(), "image_nonzero": res.image_nonzero,
            "algebraic_integer": res.algebraic_integer, "not_movable": res.not_movable,
            "witness": witness_to_json(res.witness), "note": res.note,
        })
    return C, z


def cmd_diag(args, report):
    C, z, info = load_complex(report["job"], args.input)
    report["input"] = info
    D = truncated_diagonalize(C, Fraction(report["job"]["cutoff"]))
    report["results"].append(diag_to_json(D))
    return C, z


def cmd_chain(args, report):
    C, z, info = load_complex(report["job"], args.input)
    report["input"] = info
    v = decide_movable_int(C, z, SignPolicy(args.policy), box=args.box)
    report["results"].append(verdict_to_json(v))
    if v.outcome is Outcome.MOVABLE:
        ch = build_infinite_chain(C, z, v.delta, v.chain, Fraction(report["job"]["cutoff"]))
        report["results"].append({
            "kind": "chain", "cutoff": rat(ch.cutoff), "spread": rat(ch.spread),
            "certified_from": rat(ch.certified_from), "delta": poly_to_json(v.delta),
            "c1": chain_to_json(v.chain), "chain": chain_to_json(ch.chain),
            "chain_text": [format_poly(p) for p in ch.chain], "terms": ch.terms(),
            "residual_valuation": rat(ch.residual_valuation(C.xi)),
        })
    return C, z


def cmd_weights(args, report):
    fb, info = load_facts(args.input)
    report["input"] = info
    res = run_factbase(FactBase(fb.spaces, fb.atoms, fb.facts, fb.queries))
    report["results"].extend(weight_to_json(w) for w in res.weights)


def cmd_catbound(args, report):
    fb, info = load_facts(args.input)
    report["input"] = info
    res = run_factbase(fb)
    report["results"].append({
        "kind": "ledger",
        "weights": [weight_to_json(w) for w in res.weights],
        "steps": [step_to_json(s) for s in res.steps],
        "ledger": None if res.ledger is None else ledger_to_json(res.ledger),
        "violations": [] if res.ledger is None else res.ledger.violations(),
    })


def surface_json(pattern_text: str) -> Dict[str, Any]:
    p = parse_pattern(pattern_text)
    res = surface_products_table(p)
    k, r = p.k, p.r
    return {
        "kind": "surface-table", "pattern": str(p), "canonical": str(p.canonical()), "k": k, "r": r,
        "cat1": res.cat1, "ccat1": res.ccat1, "cat": res.cat, "difference": res.difference, "closed": res.closed,
        "expected": {"cat1": 1 + k + r, "cat": 1 + 2 * r, "difference": k - r},
        "weight": weight_to_json(res.weight),
        "witness": witness_to_json(res.witness),
        "ledgers": [ledger_to_json(L) for L in res.ledgers().values()],
    }


def cmd_surfaces(args, report):
    pats = report["job"]["patterns"]
    # the pipeline runs once per canonical pattern; reorderings share its certificates
    canon = sorted({str(parse_pattern(p).canonical()) for p in pats})
    n = workers()
    if n > 1 and len(canon) > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            done = dict(zip(canon, pool.map(surface_json, canon)))
    else:
        done = {c: surface_json(c) for c in canon}
    for p in pats:
        res = dict(done[str(parse_pattern(p).canonical())])
        res["pattern"] = p
        report["results"].append(res)
    report["input"] = {"kind": "patterns", "name": None, "sha256": digest("\n".join(pats))}


def cmd_fixtures(args, report):
    files = fx.emitted_files()
    names = sorted(files) if not args.name else [n for n in sorted(files) if n.split(".")[0] in args.name]
    if args.name and not names:
        raise InputError(f"unknown fixture {args.name[0]!r}; known: {', '.join(sorted(files))}")
    for n in names:
        report["results"].append({"kind": "fixture", "name": n, "sha256": digest(files[n]), "text": files[n]})
        if args.dir:
            Path(args.dir).mkdir(parents=True, exist_ok=True)
            (Path(args.dir) / n).write_text(files[n])
    report["input"] = None


# ---------------------------------------------------------------------------
# verification of a finished report


def verify_report(report: Dict[str, Any], input_path: Optional[str] = None) -> List[str]:
    """Re-check every certificate in a report against the job's input; returns failure messages."""
    cmd = report.get("command")
    job = report.get("job", {})
    info = report.get("input") or {}
    if info.get("kind") == "file":
        if input_path is None:
            return [f"report was made from {info.get('name')}; pass it with --input"]
        if _read(input_path)[1] != info.get("sha256"):
            return ["input file does not match the digest recorded in the report"]
    if cmd in COMPLEX_COMMANDS:
        C, z, got = load_complex(job, input_path if info.get("kind") == "file" else None)
        if got["sha256"] != info.get("sha256"):
            return ["fixture digest does not match the report"]
        return verify_complex_results(report, C, z)
    if cmd in FACT_COMMANDS:
        fb, _ = load_facts(input_path)
        out: List[str] = []
        if cmd == "weights":
            return check_weights(report["results"], fb.atoms, fb.facts)
        for res in report["results"]:
            out += check_weights(res["weights"], fb.atoms, fb.facts)
            if res["ledger"] is not None:
                out += check_ledgers([res["ledger"]], fb.atoms, fb.facts)
            for s in res["steps"]:
                if not replay(step_from_json(s, fb.atoms), facts=fb.facts):
                    out.append(f"step does not replay: {s['text']}")
        return out
    if cmd == "surfaces":
        return _verify_surfaces(report)
    if cmd == "fixtures":
        files = fx.emitted_files()
        return [f"fixture {r['name']} differs from the built-in corpus" for r in report["results"]
                if files.get(r["name"]) != r["text"] or digest(r["text"]) != r["sha256"]]
    return [f"unknown command {cmd!r}"]


def _verify_surfaces(report) -> List[str]:
    out = []
    for res in report["results"]:
        tag = f"pattern {res['pattern']}"
        p = parse_pattern(res["canonical"])
        k, r = p.k, p.r
        if parse_pattern(res["pattern"]).canonical() != p:
            out.append(f"{tag}: canonical form mismatch")
        atoms = {a.name: a for a in pattern_atoms(k)}
        out += [f"{tag}: {m}" for m in check_ledgers(res["ledgers"], atoms)]
        out += [f"{tag}: {m}" for m in check_weights([res["weight"]], atoms, [])]
        Q, w0 = pushed_product(p)
        if not verify_pairing(Q, witness_from_json(res["witness"], w0.cycle)):
            out.append(f"{tag}: product pairing witness does not verify")
        M = next(d for d in res["ledgers"] if d["name"] == "M")["bounds"]
        for inv, key in (("cat1", "cat1"), ("ccat1", "ccat1"), ("cat_xi", "cat")):
            if M[inv]["lower"] != res[key] or M[inv]["upper"] != res[key]:
                out.append(f"{tag}: {inv} is not closed at the reported value")
        if res["difference"] != res["cat1"] - res["cat"]:
            out.append(f"{tag}: difference is inconsistent")
    return out


# ---------------------------------------------------------------------------
# text output


def render_text(report: Dict[str, Any]) -> str:
    lines = []
    for res in report["results"]:
        kind = res["kind"]
        if kind == "movability":
            if res["outcome"] == "Movable":
                lines.append(f"Movable{{delta={res['delta_text']}}} over {res['ring']}")
            elif res["outcome"] == "NotMovable":
                detail = f"d={res['d']}" if res["d"] not in (None, 0) else "pairing witness"
                lines.append(f"NotMovable{{{detail}}} over {res['ring']}")
            else:
                lines.append("Unknown: " + "; ".join(res["notes"]))
        elif kind == "field-movability":
            lines.append(f"movable over Q, x = {res['x_text']}" if res["movable"] else "not movable over Q")
        elif kind == "pairing":
            mono = " ".join(res["monodromy"]) or "trivial"
            lines.append(f"monodromy {mono}: image {'nonzero' if res['image_nonzero'] else 'zero'}, "
                         f"algebraic integer {res['algebraic_integer']}, NotMovable {res['not_movable']}")
        elif kind == "diagonalization":
            for q, b in res["blocks"].items():
                lines.append(f"degree {q}: mu = {len(b['diagonal'])}, diagonal = [{', '.join(b['diagonal_text'])}]")
            lines.append(f"complete: {res['complete']}")
        elif kind == "chain":
            lines.append(f"c' truncated at {res['cutoff']} ({res['terms']} terms, s = {res['spread']}):")
            lines.extend(f"  {p}" for p in res["chain_text"])
        elif kind == "weight":
            lines.append(res["text"])
            lines.extend(f"  [{s['rule']}] {s['statement']}" for s in res["trace"])
        elif kind == "ledger":
            lines.extend(w["text"] for w in res["weights"])
            if res["ledger"]:
                for inv, b in res["ledger"]["bounds"].items():
                    lines.append(f"{inv}: [{b['lower']}, {b['upper']}]")
                lines.extend("  " + s["text"] for s in res["ledger"]["history"])
        elif kind == "surface-table":
            lines.append(f"{res['pattern']}: cat1 = {res['cat1']}, ccat1 = {res['ccat1']}, cat = {res['cat']}, "
                         f"difference = {res['difference']}, closed = {res['closed']}")
        elif kind == "fixture":
            lines.append(f"== {res['name']}")
            lines.append(res["text"].rstrip("\n"))
    if "verification" in report:
        v = report["verification"]
        lines.append("verify: ok" if not v["failures"] else "verify: FAILED\n  " + "\n  ".join(v["failures"]))
    return "\n".join(lines) + "\n"


def _inconclusive(report) -> bool:
    res = report["results"]
    return bool(res) and all(r.get("kind") == "movability" and r["outcome"] == "Unknown" for r in res)


# ---------------------------------------------------------------------------
# argument parsing


def _positive(text: str) -> Fraction:
    v = Fraction(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("cutoff must be positive")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("box radius must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="novicat", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--output", "-o", help="write the report here instead of stdout")
        p.add_argument("--verify", action="store_true", help="re-check every certificate in the report")

    def complex_input(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--input", "-i", help="presentation file")
        g.add_argument("--fixture", help="built-in fixture: " + ", ".join(fx.NAMES) + ", genusN")
        p.add_argument("--xi", help='xi rows, e.g. "1" or "1 0; 0 1"')

    p = sub.add_parser("movable", help="decide movability over Z (or Q with --coeffs rat)")
    complex_input(p)
    p.add_argument("--policy", choices=[s.value for s in SignPolicy], default=SignPolicy.STRICT.value)
    p.add_argument("--box", type=_nonneg, default=3, help="search radius for rank >= 2")
    p.add_argument("--coeffs", choices=("int", "rat"), default="int")
    common(p)

    p = sub.add_parser("field-movable", help="decide movability over Q")
    complex_input(p)
    common(p)

    p = sub.add_parser("pairing", help="evaluate the bundle obstruction")
    complex_input(p)
    p.add_argument("--monodromy", action="append", help='"generic" or rational values; repeatable')
    common(p)

    p = sub.add_parser("novikov-diag", help="truncated diagonalization over the Novikov ring")
    complex_input(p)
    p.add_argument("--cutoff", type=_positive, default=Fraction(10))
    common(p)

    p = sub.add_parser("chain", help="truncated infinite chain of a movable class")
    complex_input(p)
    p.add_argument("--cutoff", type=_positive, default=Fraction(10))
    p.add_argument("--policy", choices=[s.value for s in SignPolicy], default=SignPolicy.STRICT.value)
    p.add_argument("--box", type=_nonneg, default=3)
    common(p)

    for name, hlp in (("weights", "propagate category weights"), ("catbound", "bounds for cat, cat^1, ccat^1")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("--input", "-i", required=True, help="fact-base file")
        common(p)

    p = sub.add_parser("surfaces", help="cat^1 of products of hyperbolic surfaces")
    p.add_argument("--pattern", action="append", help='e.g. "2:nz,3:z,2:nz"; repeatable')
    p.add_argument("--all", action="store_true", help="every pattern with k <= --max-k and genera --genera")
    p.add_argument("--max-k", type=int, default=3)
    p.add_argument("--genera", default="2,3")
    common(p)

    p = sub.add_parser("fixtures", help="emit the built-in corpus")
    p.add_argument("--name", action="append", help="only this fixture (repeatable)")
    p.add_argument("--dir", help="also write the files to this directory")
    common(p)

    p = sub.add_parser("verify", help="re-check a saved machine-readable report")
    p.add_argument("report")
    p.add_argument("--input", "-i", help="the input file the report was made from")
    return ap


COMMANDS = {
    "movable": cmd_movable, "field-movable": cmd_field, "pairing": cmd_pairing, "novikov-diag": cmd_diag,
    "chain": cmd_chain, "weights": cmd_weights, "catbound": cmd_catbound, "surfaces": cmd_surfaces,
    "fixtures": cmd_fixtures,
}

INPUT_ERRORS = (InputError, PatternError, IllTyped, XiMismatch, NotInjective, RankMismatch, IncompatibleXi,
                UnsupportedMonodromy, json.JSONDecodeError)


def make_job(args) -> Dict[str, Any]:
    cmd = args.command
    if cmd in COMPLEX_COMMANDS:
        extra: Dict[str, Any] = {}
        if cmd in ("movable", "chain"):
            extra.update(policy=args.policy, box=args.box)
        if cmd == "movable":
            extra["coeffs"] = args.coeffs
        if cmd in ("novikov-diag", "chain"):
            extra["cutoff"] = rat(args.cutoff)
        if cmd == "pairing":
            extra["monodromy"] = args.monodromy or ["generic"]
        return _job(args, **extra)
    if cmd == "surfaces":
        if args.all:
            genera = [int(g) for g in args.genera.split(",") if g.strip()]
            pats = [str(p) for p in all_patterns(args.max_k, genera)]
        else:
            pats = [str(parse_pattern(p)) for p in (args.pattern or [])]
        if not pats:
            raise InputError("give --pattern or --all")
        return {"patterns": pats}
    if cmd == "fixtures":
        return {"names": sorted(args.name or [])}
    return {}


def run(args) -> Tuple[int, Optional[Dict[str, Any]]]:
    if args.command == "verify":
        report = json.loads(Path(args.report).read_text())
        fails = verify_report(report, args.input)
        report["verification"] = {"failures": fails}
        return (EXIT_VERIFY if fails else EXIT_OK), report
    t0 = time.perf_counter()
    report = new_report(args.command, make_job(args), None)
    COMMANDS[args.command](args, report)
    report["timing"] = {"seconds": round(time.perf_counter() - t0, 3)}
    code = EXIT_INCONCLUSIVE if _inconclusive(report) else EXIT_OK
    if args.verify:
        # check the serialized form, not the in-memory objects
        fails = verify_report(json.loads(dumps(report)), getattr(args, "input", None))
        report["verification"] = {"failures": fails}
        if fails:
            code = EXIT_VERIFY
    return code, report


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        code, report = run(args)
    except INPUT_ERRORS as exc:
        print(f"novicat: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NotClosed, CertificateError, BoundError) as exc:
        print(f"novicat: verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ValueError, OSError) as exc:
        print(f"novicat: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    fmt = getattr(args, "format", "json")
    out = dumps(report) if fmt == "json" else render_text(report)
    if getattr(args, "output", None):
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
