"""Free chain complexes over Z[H] for free abelian covers.

Complexes come from group presentations (the presentation 2-complex, via Fox
calculus), from surface presentations, and from cartesian products of those.
Boundary matrices act on column vectors: ``boundaries[q]`` has shape
``(ranks[q-1], ranks[q])`` and its j-th column is the boundary of the j-th
q-cell.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .exactalg.smith import smith_normal_form
from .groupring import Exponent, LaurentPoly, XiOrder, format_poly, parse_poly
from .matrix import PolyMatrix

Letter = Tuple[str, int]
Word = Tuple[Letter, ...]


class InputError(ValueError):
    """Malformed input; carries a 1-based line/column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class NotACocycle(ValueError):
    pass


# ---------------------------------------------------------------------------
# words and presentations


_LETTER = re.compile(r"([A-Za-z_][A-Za-z_0-9]*)(?:\^(-?\d+))?")


def parse_word(text: str, generators: Sequence[str] | None = None) -> Word:
    """Parse ``"t a t^-1 a^-2"`` into signed letters (powers are expanded)."""
    letters: List[Letter] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        if text[pos].isspace() or text[pos] == "*":
            pos += 1
            continue
        m = _LETTER.match(text, pos)
        if not m:
            raise InputError(f"cannot parse word {text!r}", column=pos + 1)
        name, power = m.group(1), int(m.group(2) or 1)
        if generators is not None and name not in generators:
            raise InputError(f"unknown generator {name!r}", column=pos + 1)
        if power == 0:
            raise InputError(f"zero power of {name!r}", column=pos + 1)
        letters.extend([(name, 1 if power > 0 else -1)] * abs(power))
        pos = m.end()
    return tuple(letters)


def format_word(word: Word) -> str:
    out = []
    i = 0
    while i < len(word):
        name, s = word[i]
        k = i
        while k < len(word) and word[k] == (name, s):
            k += 1
        power = (k - i) * s
        out.append(name if power == 1 else f"{name}^{power}")
        i = k
    return " ".join(out)


def is_freely_reduced(word: Word) -> bool:
    return all(not (a[0] == b[0] and a[1] == -b[1]) for a, b in zip(word, word[1:]))


def free_reduce(word: Sequence[Letter]) -> Word:
    out: List[Letter] = []
    for letter in word:
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


@dataclass(frozen=True)
class GroupPresentation:
    generators: Tuple[str, ...]
    relators: Tuple[Word, ...]
    relator_names: Tuple[str, ...] = ()

    def __post_init__(self):
        if len(set(self.generators)) != len(self.generators):
            raise InputError("duplicate generator names")
        for w in self.relators:
            for name, _ in w:
                if name not in self.generators:
                    raise InputError(f"relator uses undeclared generator {name!r}")
            if not is_freely_reduced(w):
                raise InputError(f"relator {format_word(w)!r} is not freely reduced")
        if not self.relator_names:
            object.__setattr__(self, "relator_names", tuple(f"r{i + 1}" for i in range(len(self.relators))))
        elif len(self.relator_names) != len(self.relators):
            raise InputError("relator names and relators differ in number")


def fox_derivative(word: Word, x: str) -> Dict[Word, int]:
    """Fox derivative d(word)/dx as an element of the integral free group ring.

    Keys are freely reduced words; values are nonzero integers.
    """
    out: Dict[Word, int] = {}
    prefix: List[Letter] = []
    for name, s in word:
        if name == x:
            if s == 1:
                key = free_reduce(prefix)
                out[key] = out.get(key, 0) + 1
            else:
                key = free_reduce(prefix + [(name, -1)])
                out[key] = out.get(key, 0) - 1
        prefix.append((name, s))
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True)
class PeriodProjection:
    """The map pi_1 -> H = Z^r sending each generator to its period vector."""

    rank: int
    images: Mapping[str, Exponent]
    xi: XiOrder

    def __post_init__(self):
        if self.xi.rank != self.rank:
            raise InputError(f"xi has rank {self.xi.rank} but the projection has rank {self.rank}")
        for g, e in self.images.items():
            if len(e) != self.rank:
                raise InputError(f"image of {g!r} has length {len(e)}, expected {self.rank}")

    def word_exponent(self, word: Word) -> Exponent:
        e = [0] * self.rank
        for name, s in word:
            if name not in self.images:
                raise InputError(f"generator {name!r} has no projection")
            for i, v in enumerate(self.images[name]):
                e[i] += s * v
        return tuple(e)

    def validate(self, pres: GroupPresentation) -> None:
        missing = [g for g in pres.generators if g not in self.images]
        if missing:
            raise InputError(f"generators without projection: {missing}")
        for name, w in zip(pres.relator_names, pres.relators):
            if any(self.word_exponent(w)):
                raise InputError(f"relator {name} maps to {self.word_exponent(w)}, not 0: xi is not a cocycle")
        if self.rank:
            snf = smith_normal_form([list(self.images[g]) for g in pres.generators])
            if snf.rank < self.rank:
                raise InputError("generator images do not span a finite-index sublattice of H")


def project_to_H(element: Mapping[Word, int], proj: PeriodProjection) -> LaurentPoly:
    acc: Dict[Exponent, int] = {}
    for w, c in element.items():
        e = proj.word_exponent(w)
        acc[e] = acc.get(e, 0) + c
    return LaurentPoly(acc, proj.rank)


# ---------------------------------------------------------------------------
# chain complexes


@dataclass(frozen=True)
class CycleVector:
    degree: int
    coords: Tuple[LaurentPoly, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coords)

    def scaled(self, f: LaurentPoly) -> "CycleVector":
        return CycleVector(self.degree, tuple(f * c for c in self.coords))


@dataclass(frozen=True)
class EquivariantChainComplex:
    rank: int
    xi: XiOrder
    ranks: Tuple[int, ...]
    boundaries: Mapping[int, PolyMatrix]
    labels: Tuple[Tuple[str, ...], ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(self.ranks))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(
                tuple(f"e{q}_{j}" for j in range(n)) for q, n in enumerate(self.ranks)))
        for q, M in self.boundaries.items():
            if M.shape != (self.dim(q - 1), self.dim(q)):
                raise ValueError(f"boundary {q} has shape {M.shape}, expected {(self.dim(q - 1), self.dim(q))}")

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def dim(self, q: int) -> int:
        return self.ranks[q] if 0 <= q < len(self.ranks) else 0

    def boundary(self, q: int) -> PolyMatrix:
        M = self.boundaries.get(q)
        if M is None:
            return PolyMatrix.zeros(self.dim(q - 1), self.dim(q), self.rank)
        return M

    def apply_boundary(self, q: int, vec: Sequence[LaurentPoly]) -> List[LaurentPoly]:
        return self.boundary(q).apply(list(vec))

    def is_cycle(self, z: CycleVector) -> bool:
        if len(z.coords) != self.dim(z.degree):
            return False
        return all(v.is_zero() for v in self.apply_boundary(z.degree, z.coords))

    def euler_characteristic(self) -> int:
        return sum((-1) ** q * n for q, n in enumerate(self.ranks))

    def cell_index(self, q: int, label: str) -> int:
        try:
            return self.labels[q].index(label)
        except ValueError:
            raise InputError(f"no {q}-cell named {label!r}") from None

    def zero_chain(self, q: int) -> Tuple[LaurentPoly, ...]:
        return tuple(LaurentPoly.zero(self.rank) for _ in range(self.dim(q)))


def check_boundary_squared(C: EquivariantChainComplex) -> bool:
    for q in range(2, len(C.ranks)):
        if not (C.boundary(q - 1) @ C.boundary(q)).is_zero():
            return False
    return True


def build_presentation_complex(pres: GroupPresentation, proj: PeriodProjection, name: str = "") -> EquivariantChainComplex:
    proj.validate(pres)
    r = proj.rank
    n1 = len(pres.generators)
    n2 = len(pres.relators)
    one = LaurentPoly.one(r)
    d1 = {}
    for j, g in enumerate(pres.generators):
        d1[(0, j)] = LaurentPoly.monomial(proj.images[g]) - one
    d2 = {}
    for k, w in enumerate(pres.relators):
        for j, g in enumerate(pres.generators):
            d2[(j, k)] = project_to_H(fox_derivative(w, g), proj)
    boundaries = {1: PolyMatrix(1, n1, d1, r)}
    ranks = (1, n1) if n2 == 0 else (1, n1, n2)
    if n2:
        boundaries[2] = PolyMatrix(n1, n2, d2, r)
    labels = (("*",), tuple(pres.generators), tuple(pres.relator_names))[: len(ranks)]
    return EquivariantChainComplex(r, proj.xi, ranks, boundaries, labels, name)


def surface_complex(genus: int) -> GroupPresentation:
    """One-relator presentation <a1, b1, ..., ag, bg | [a1,b1]...[ag,bg]>."""
    if genus < 1:
        raise ValueError("surface genus must be at least 1")
    gens = []
    word: List[Letter] = []
    for i in range(1, genus + 1):
        a, b = f"a{i}", f"b{i}"
        gens += [a, b]
        word += [(a, 1), (b, 1), (a, -1), (b, -1)]
    return GroupPresentation(tuple(gens), (tuple(word),), ("r",))


def surface_projection(genus: int, nonzero: bool) -> PeriodProjection:
    """xi(a1) = 1 and xi = 0 on the other generators; rank 0 when ``nonzero`` is False."""
    gens = [f"{c}{i}" for i in range(1, genus + 1) for c in "ab"]
    if nonzero:
        return PeriodProjection(1, {g: (1,) if g == "a1" else (0,) for g in gens}, XiOrder([[1]]))
    return PeriodProjection(0, {g: () for g in gens}, XiOrder.trivial())


# ---------------------------------------------------------------------------
# products and period quotients


def product_xi(a: XiOrder, b: XiOrder) -> XiOrder:
    """Order for xi_X x 1 + 1 x xi_Y on H_X x H_Y.

    The first row is the sum class; the block-diagonal rows below it make the
    order injective on the product lattice.
    """
    ra, rb = a.rank, b.rank
    rows = [list(a.rows[0]) + list(b.rows[0])]
    rows += [list(row) + [0] * rb for row in a.rows]
    rows += [[0] * ra + list(row) for row in b.rows]
    if ra + rb:
        # drop rows that are linear combinations of earlier ones only when they are zero
        rows = [row for row in rows if any(row)] or [[0] * (ra + rb)]
    return XiOrder(rows, ra + rb)


def _product_cells(C: EquivariantChainComplex, D: EquivariantChainComplex):
    """For each total degree n: list of (p, i, j) meaning C-cell (p, i) x D-cell (n-p, j)."""
    top = C.top + D.top
    cells = []
    for n in range(top + 1):
        block = []
        for p in range(max(0, n - D.top), min(n, C.top) + 1):
            for i in range(C.dim(p)):
                for j in range(D.dim(n - p)):
                    block.append((p, i, j))
        cells.append(block)
    return cells


def product_complex(C: EquivariantChainComplex, D: EquivariantChainComplex, name: str = "") -> EquivariantChainComplex:
    """Tensor product over Z[H_C x H_D]; d(x(x)y) = dx(x)y + (-1)^|x| x(x)dy."""
    r = C.rank + D.rank
    cells = _product_cells(C, D)
    index = [{cell: k for k, cell in enumerate(block)} for block in cells]
    cols_C = {q: _columns(C.boundary(q)) for q in range(1, C.top + 1)}
    cols_D = {q: _columns(D.boundary(q)) for q in range(1, D.top + 1)}
    boundaries = {}
    for n in range(1, len(cells)):
        entries: Dict[Tuple[int, int], LaurentPoly] = {}
        for col, (p, i, j) in enumerate(cells[n]):
            if p >= 1:
                for ii, v in cols_C[p].get(i, ()):
                    row = index[n - 1][(p - 1, ii, j)]
                    entries[(row, col)] = v.embed(r, 0)
            if n - p >= 1:
                sign = -1 if p % 2 else 1
                for jj, v in cols_D[n - p].get(j, ()):
                    row = index[n - 1][(p, i, jj)]
                    term = v.embed(r, C.rank) * sign
                    entries[(row, col)] = entries[(row, col)] + term if (row, col) in entries else term
        boundaries[n] = PolyMatrix(len(cells[n - 1]), len(cells[n]), entries, r)
    labels = tuple(
        tuple(f"{C.labels[p][i]}|{D.labels[n - p][j]}" for (p, i, j) in block)
        for n, block in enumerate(cells)
    )
    return EquivariantChainComplex(r, product_xi(C.xi, D.xi), tuple(len(b) for b in cells),
                                   boundaries, labels, name or f"{C.name} x {D.name}".strip())


def _columns(M: PolyMatrix):
    out: Dict[int, List[Tuple[int, LaurentPoly]]] = {}
    for (i, j), v in M.entries.items():
        out.setdefault(j, []).append((i, v))
    return out


def cross_cycle(C: EquivariantChainComplex, D: EquivariantChainComplex, z: CycleVector, w: CycleVector) -> CycleVector:
    """The cross product z x w as a chain of ``product_complex(C, D)``."""
    r = C.rank + D.rank
    n = z.degree + w.degree
    block = _product_cells(C, D)[n]
    coords = []
    for (p, i, j) in block:
        if p == z.degree:
            coords.append(z.coords[i].embed(r, 0) * w.coords[j].embed(r, C.rank))
        else:
            coords.append(LaurentPoly.zero(r))
    return CycleVector(n, tuple(coords))


class IncompatibleXi(ValueError):
    pass


def check_period_map(matrix: Sequence[Sequence[int]], source: XiOrder, target: XiOrder) -> None:
    r_src = source.rank
    r_tgt = target.rank
    if len(matrix) != r_tgt or any(len(row) != r_src for row in matrix):
        raise InputError(f"period map must be {r_tgt}x{r_src}")
    if r_tgt:
        snf = smith_normal_form([list(row) for row in matrix])
        if snf.rank < r_tgt or any(d != 1 for d in snf.factors):
            raise InputError("period map is not surjective")
    for k in range(r_src):
        e = [0] * r_src
        e[k] = 1
        img = [row[k] for row in matrix]
        s_src = source.sign(e)
        s_tgt = target.sign(img) if r_tgt else 0
        if s_src > 0 and s_tgt <= 0 or s_src < 0 and s_tgt >= 0:
            raise IncompatibleXi(f"generator {k} has xi-sign {s_src} but its image has sign {s_tgt}")


def quotient_periods(C: EquivariantChainComplex, matrix: Sequence[Sequence[int]], target: XiOrder,
                     check: bool = True) -> EquivariantChainComplex:
    """Apply the ring map Z[H_C] -> Z[H] induced by ``matrix`` entrywise."""
    if check:
        check_period_map(matrix, C.xi, target)
    r = target.rank
    boundaries = {q: M.map(lambda v: v.map_exponents(matrix, r), rank=r) for q, M in C.boundaries.items()}
    return EquivariantChainComplex(r, target, C.ranks, boundaries, C.labels, C.name)


def push_cycle(z: CycleVector, matrix: Sequence[Sequence[int]], rank: int) -> CycleVector:
    return CycleVector(z.degree, tuple(c.map_exponents(matrix, rank) for c in z.coords))


def with_xi(C: EquivariantChainComplex, xi: XiOrder) -> EquivariantChainComplex:
    if xi.rank != C.rank:
        raise InputError(f"xi has rank {xi.rank}, complex has rank {C.rank}")
    return EquivariantChainComplex(C.rank, xi, C.ranks, C.boundaries, C.labels, C.name)


# ---------------------------------------------------------------------------
# presentation input files


@dataclass
class PresentationInput:
    presentation: GroupPresentation
    projection: PeriodProjection
    cycle: Optional[Tuple[int, Dict[str, str]]] = None
    name: str = ""

    def complex(self, xi: XiOrder | None = None) -> EquivariantChainComplex:
        proj = self.projection
        if xi is not None:
            proj = PeriodProjection(proj.rank, proj.images, xi)
        return build_presentation_complex(self.presentation, proj, self.name)

    def cycle_vector(self, C: EquivariantChainComplex) -> Optional[CycleVector]:
        if self.cycle is None:
            return None
        q, coords = self.cycle
        vec = [LaurentPoly.zero(C.rank)] * C.dim(q)
        for label, text in coords.items():
            vec[C.cell_index(q, label)] = parse_poly(text, C.rank)
        return CycleVector(q, tuple(vec))


_SECTIONS = ("generators", "relators", "xi", "project", "cycle")


def parse_presentation(text: str, name: str = "") -> PresentationInput:
    sections: Dict[str, List[Tuple[int, str]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = re.fullmatch(r"\s*\[(\w+)\]\s*", line)
        if m:
            current = m.group(1).lower()
            if current not in _SECTIONS:
                raise InputError(f"unknown section [{current}]", lineno, line.index("[") + 1)
            if current in sections:
                raise InputError(f"duplicate section [{current}]", lineno, 1)
            sections[current] = []
            continue
        if current is None:
            raise InputError("content before the first section header", lineno, 1)
        sections[current].append((lineno, line))

    for required in ("generators", "xi", "project"):
        if required not in sections:
            raise InputError(f"missing section [{required}]")

    generators: List[str] = []
    for lineno, line in sections["generators"]:
        for tok in re.split(r"[\s,]+", line.strip()):
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", tok):
                raise InputError(f"bad generator name {tok!r}", lineno, line.find(tok) + 1)
            generators.append(tok)

    relators, rel_names = [], []
    for lineno, line in sections.get("relators", []):
        body = line
        label = None
        m = re.match(r"\s*([A-Za-z_][A-Za-z_0-9]*)\s*:", line)
        if m:
            label, body = m.group(1), line[m.end():]
        try:
            word = parse_word(body, generators)
        except InputError as exc:
            offset = len(line) - len(body)
            raise InputError(str(exc).split(": ", 1)[-1], lineno,
                             (exc.column or 1) + offset + len(body) - len(body.lstrip())) from None
        if not is_freely_reduced(word):
            raise InputError(f"relator {body.strip()!r} is not freely reduced", lineno, 1)
        relators.append(word)
        rel_names.append(label or f"r{len(relators)}")

    xi_lines = [line for _, line in sections["xi"]]
    try:
        xi = XiOrder.parse(";".join(xi_lines))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad [xi] matrix: {exc}", sections["xi"][0][0] if sections["xi"] else None) from None
    rank = xi.rank

    images: Dict[str, Exponent] = {}
    for lineno, line in sections["project"]:
        m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z_0-9]*)\s*(?::|->|=)\s*(.*)", line)
        if not m:
            raise InputError("expected 'generator: exponent row'", lineno, 1)
        vals = [v for v in re.split(r"[\s,]+", m.group(2).strip()) if v]
        try:
            images[m.group(1)] = tuple(int(v) for v in vals)
        except ValueError:
            raise InputError(f"non-integer exponent in {m.group(2)!r}", lineno, m.start(2) + 1) from None
        if len(images[m.group(1)]) != rank:
            raise InputError(f"exponent row has length {len(vals)}, xi has rank {rank}", lineno, m.start(2) + 1)

    cycle = None
    if "cycle" in sections:
        degree = None
        coords: Dict[str, str] = {}
        for lineno, line in sections["cycle"]:
            m = re.fullmatch(r"\s*([^=:]+?)\s*[=:]\s*(.*)", line)
            if not m:
                raise InputError("expected 'label = polynomial'", lineno, 1)
            key, val = m.group(1), m.group(2).strip()
            if key == "degree":
                degree = int(val)
            else:
                try:
                    parse_poly(val, rank)
                except ValueError as exc:
                    raise InputError(str(exc), lineno, m.start(2) + 1) from None
                coords[key] = val
        if degree is None:
            raise InputError("[cycle] needs a 'degree = q' line", sections["cycle"][0][0] if sections["cycle"] else None)
        cycle = (degree, coords)

    pres = GroupPresentation(tuple(generators), tuple(relators), tuple(rel_names))
    proj = PeriodProjection(rank, images, xi)
    proj.validate(pres)
    return PresentationInput(pres, proj, cycle, name)


def format_presentation(inp: PresentationInput) -> str:
    """Canonical text form; ``parse_presentation`` inverts it."""
    pres, proj = inp.presentation, inp.projection
    lines = ["[generators]", " ".join(pres.generators), "", "[relators]"]
    for name, w in zip(pres.relator_names, pres.relators):
        lines.append(f"{name}: {format_word(w)}")
    lines += ["", "[xi]"]
    lines += [" ".join(str(x) for x in row) for row in proj.xi.rows] if proj.rank else []
    lines += ["", "[project]"]
    for g in pres.generators:
        lines.append(f"{g}: {' '.join(str(x) for x in proj.images[g])}".rstrip())
    if inp.cycle is not None:
        q, coords = inp.cycle
        lines += ["", "[cycle]", f"degree = {q}"]
        for label, val in coords.items():
            lines.append(f"{label} = {format_poly(parse_poly(val, proj.rank))}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# machine-readable forms


def poly_to_json(p: LaurentPoly):
    return [[list(e), str(c)] for e, c in sorted(p.items())]


def poly_from_json(data, rank: int) -> LaurentPoly:
    return LaurentPoly({tuple(e): Fraction(c) for e, c in data}, rank)


def chain_to_json(vec: Sequence[LaurentPoly]):
    return [poly_to_json(v) for v in vec]


def chain_from_json(data, rank: int) -> Tuple[LaurentPoly, ...]:
    return tuple(poly_from_json(v, rank) for v in data)


def complex_to_json(C: EquivariantChainComplex):
    return {
        "name": C.name,
        "rank": C.rank,
        "xi": C.xi.as_strings(),
        "ranks": list(C.ranks),
        "labels": [list(block) for block in C.labels],
        "boundaries": {
            str(q): [[i, j, poly_to_json(v)] for (i, j), v in sorted(M.entries.items())]
            for q, M in sorted(C.boundaries.items())
        },
    }


def complex_from_json(data) -> EquivariantChainComplex:
    r = data["rank"]
    xi = XiOrder(data["xi"], r)
    ranks = tuple(data["ranks"])
    boundaries = {}
    for q, entries in data["boundaries"].items():
        q = int(q)
        boundaries[q] = PolyMatrix(ranks[q - 1], ranks[q],
                                   {(i, j): poly_from_json(v, r) for i, j, v in entries}, r)
    return EquivariantChainComplex(r, xi, ranks, boundaries, tuple(tuple(b) for b in data["labels"]), data.get("name", ""))
