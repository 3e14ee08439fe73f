"""Typed expressions for homology and cohomology classes."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union


class IllTyped(ValueError):
    pass


@dataclass(frozen=True)
class Space:
    name: str
    dim: Optional[int] = None
    closed_manifold: bool = False
    orientable: bool = True
    connected: bool = True


@dataclass(frozen=True)
class Atom:
    name: str
    degree: int
    homology: bool
    space: Space
    coeffs: str = "Z"
    zero: bool = False

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Cap:
    u: "ClassExpr"
    z: "ClassExpr"

    def __str__(self):
        return f"cap({self.u}, {self.z})"


@dataclass(frozen=True)
class Cross:
    factors: Tuple["ClassExpr", ...]

    def __str__(self):
        return "cross(" + ", ".join(map(str, self.factors)) + ")"


@dataclass(frozen=True)
class WedgeSum:
    left: "ClassExpr"
    right: "ClassExpr"

    def __str__(self):
        return f"wedge({self.left}, {self.right})"


@dataclass(frozen=True)
class Push:
    morphism: str
    z: "ClassExpr"

    def __str__(self):
        return f"push({self.morphism}, {self.z})"


@dataclass(frozen=True)
class Dual:
    z: "ClassExpr"

    def __str__(self):
        return f"dual({self.z})"


ClassExpr = Union[Atom, Cap, Cross, WedgeSum, Push, Dual]


@dataclass(frozen=True)
class Signature:
    degree: int
    homology: bool
    space: Space


def signature(e: ClassExpr) -> Signature:
    """Degree, variance and ambient space; raises IllTyped on a malformed expression."""
    if isinstance(e, Atom):
        if e.degree < 0:
            raise IllTyped(f"{e.name} has negative degree")
        if e.space.dim is not None and e.degree > e.space.dim:
            raise IllTyped(f"{e.name} has degree above the dimension of {e.space.name}")
        return Signature(e.degree, e.homology, e.space)
    if isinstance(e, Cap):
        su, sz = signature(e.u), signature(e.z)
        if su.homology or not sz.homology:
            raise IllTyped(f"{e}: cap needs a cohomology class and a homology class")
        if su.space != sz.space:
            raise IllTyped(f"{e}: classes live on different spaces")
        if su.degree > sz.degree:
            raise IllTyped(f"{e}: cohomology degree exceeds homology degree")
        return Signature(sz.degree - su.degree, True, sz.space)
    if isinstance(e, Cross):
        if len(e.factors) < 2:
            raise IllTyped("cross needs at least two factors")
        sigs = [signature(f) for f in e.factors]
        if len({s.homology for s in sigs}) != 1:
            raise IllTyped(f"{e}: mixes homology and cohomology")
        dims = [s.space.dim for s in sigs]
        space = Space(
            " x ".join(s.space.name for s in sigs),
            None if any(d is None for d in dims) else sum(dims),
            all(s.space.closed_manifold for s in sigs),
            all(s.space.orientable for s in sigs),
            all(s.space.connected for s in sigs),
        )
        return Signature(sum(s.degree for s in sigs), sigs[0].homology, space)
    if isinstance(e, WedgeSum):
        a, b = signature(e.left), signature(e.right)
        if not (a.homology and b.homology):
            raise IllTyped(f"{e}: wedge sums take homology classes")
        if a.degree != b.degree:
            raise IllTyped(f"{e}: summands have different degrees")
        dims = [a.space.dim, b.space.dim]
        space = Space(f"{a.space.name} v {b.space.name}", None if None in dims else max(dims), False, True,
                      a.space.connected and b.space.connected)
        return Signature(a.degree, True, space)
    if isinstance(e, Push):
        s = signature(e.z)
        if not s.homology:
            raise IllTyped(f"{e}: coefficient push applies to homology classes")
        return s
    if isinstance(e, Dual):
        s = signature(e.z)
        if not s.space.closed_manifold:
            raise IllTyped(f"{e}: duality is only available on closed manifolds")
        if s.space.dim is None:
            raise IllTyped(f"{e}: the dimension of {s.space.name} is unknown")
        return Signature(s.space.dim - s.degree, not s.homology, s.space)
    raise IllTyped(f"not a class expression: {e!r}")


def subexpressions(e: ClassExpr) -> List[ClassExpr]:
    """Post-order list of e and everything it is built from (duals of closed-manifold atoms included)."""
    out: List[ClassExpr] = []
    seen = set()

    def visit(x):
        if x in seen:
            return
        if isinstance(x, Cap):
            visit(x.u)
            visit(x.z)
        elif isinstance(x, Cross):
            for f in x.factors:
                visit(f)
        elif isinstance(x, WedgeSum):
            visit(x.left)
            visit(x.right)
        elif isinstance(x, (Push, Dual)):
            visit(x.z)
        seen.add(x)
        out.append(x)

    visit(e)
    for x in list(out):
        if not isinstance(x, Dual):
            try:
                sig = signature(x)
            except IllTyped:
                continue
            if sig.space.closed_manifold and sig.space.dim is not None:
                d = Dual(x)
                if d not in seen:
                    seen.add(d)
                    out.append(d)
    return out


def flatten_cross(e: ClassExpr) -> List[ClassExpr]:
    if isinstance(e, Cross):
        out = []
        for f in e.factors:
            out.extend(flatten_cross(f))
        return out
    return [e]


# ---------------------------------------------------------------------------
# text form


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z_0-9'.]*)|([(),]))")


def parse_expr(text: str, atoms: Dict[str, Atom]) -> ClassExpr:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise IllTyped(f"cannot parse expression at column {pos + 1}: {text!r}")
        tokens.append((m.group(1) or m.group(2), m.start(1) if m.group(1) else m.start(2)))
        pos = m.end()
    i = 0

    def expect(tok):
        nonlocal i
        if i >= len(tokens) or tokens[i][0] != tok:
            col = tokens[i][1] + 1 if i < len(tokens) else len(text) + 1
            raise IllTyped(f"expected {tok!r} at column {col}")
        i += 1

    def parse():
        nonlocal i
        if i >= len(tokens):
            raise IllTyped("unexpected end of expression")
        name, col = tokens[i]
        i += 1
        if i < len(tokens) and tokens[i][0] == "(":
            i += 1
            args = [parse_arg(name)]
            while i < len(tokens) and tokens[i][0] == ",":
                i += 1
                args.append(parse_arg(name, len(args)))
            expect(")")
            return build(name, args, col)
        if name not in atoms:
            raise IllTyped(f"unknown atom {name!r} at column {col + 1}")
        return atoms[name]

    def parse_arg(fn, index=0):
        nonlocal i
        if fn == "push" and index == 0:
            name, _ = tokens[i]
            i += 1
            return name
        return parse()

    def build(fn, args, col):
        if fn == "cap" and len(args) == 2:
            return Cap(args[0], args[1])
        if fn == "cross" and len(args) >= 2:
            return Cross(tuple(args))
        if fn in ("wedge", "wedge_sum") and len(args) == 2:
            return WedgeSum(args[0], args[1])
        if fn == "push" and len(args) == 2:
            return Push(args[0], args[1])
        if fn == "dual" and len(args) == 1:
            return Dual(args[0])
        raise IllTyped(f"bad constructor {fn}/{len(args)} at column {col + 1}")

    e = parse()
    if i != len(tokens):
        raise IllTyped(f"trailing input at column {tokens[i][1] + 1}")
    signature(e)
    return e
