"""Built-in corpus of presentations, complexes and cycles."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional

from .complexes import (
    CycleVector, EquivariantChainComplex, PresentationInput, build_presentation_complex,
    cross_cycle, format_presentation, parse_presentation, product_complex, surface_complex,
    surface_projection, with_xi,
)
from .groupring import LaurentPoly, XiOrder

CIRCLE = """\
# the circle, cover = the real line
[generators]
t

[relators]

[xi]
1

[project]
t: 1

[cycle]
degree = 0
* = 1
"""

TORUS = """\
# torus with xi(a) = 1, xi(b) = 0; z is the class of the b-loop
[generators]
a b

[relators]
r: a b a^-1 b^-1

[xi]
1

[project]
a: 1
b: 0

[cycle]
degree = 1
b = 1
"""

BS12 = """\
# Baumslag-Solitar group BS(1,2); a is killed by the period map
[generators]
a t

[relators]
r: t a t^-1 a^-2

[xi]
1

[project]
a: 0
t: 1

[cycle]
degree = 1
a = 1
"""

TEXTS = {"circle": CIRCLE, "torus": TORUS, "bs12": BS12}

SURFACE_FACTS = """\
# a hyperbolic surface S with a class pairing nontrivially in a generic bundle
space S dim=2 closed connected
atom z homology 1 S
atom u cohomology 1 S
query z
query dual(z)
query cap(u, z)
pairing u z
obstruction z k=0 bundle=generic
ledger S cat=3 cat_xi=1 xi=nonzero
"""

PRODUCT_FACTS = """\
# two surfaces and the cross product of degree-one classes
space S1 dim=2 closed connected
space S2 dim=2 closed connected
atom z1 homology 1 S1
atom z2 homology 1 S2
query cross(z1, z2)
query push(q, cross(z1, z2))
"""

FACT_TEXTS = {"surface": SURFACE_FACTS, "product": PRODUCT_FACTS}


@dataclass(frozen=True)
class Fixture:
    name: str
    complex: EquivariantChainComplex
    cycle: CycleVector
    text: Optional[str] = None


def presentation(name: str) -> PresentationInput:
    return parse_presentation(TEXTS[name], name)


def fixture(name: str, xi: XiOrder | None = None) -> Fixture:
    if name in TEXTS:
        inp = presentation(name)
        C = inp.complex(xi)
        return Fixture(name, C, inp.cycle_vector(C), TEXTS[name])
    if name.startswith("genus"):
        g = int(name[5:])
        return surface_fixture(g)
    if name == "circle2":
        c = fixture("circle")
        C = product_complex(c.complex, c.complex, "circle2")
        z = cross_cycle(c.complex, c.complex, c.cycle, c.cycle)
        if xi is not None:
            C = with_xi(C, xi)
        return Fixture(name, C, z)
    raise KeyError(f"unknown fixture {name!r}")


def surface_fixture(genus: int, basis_index: int = 0) -> Fixture:
    """Genus-g surface with xi(a1) = 1; the cycle is a generic homology basis cycle."""
    from .exactalg.linalg import homology_over_fraction_field

    C = build_presentation_complex(surface_complex(genus), surface_projection(genus, True), f"genus{genus}")
    h = homology_over_fraction_field(C, 1)
    return Fixture(f"genus{genus}", C, CycleVector(1, h.basis[basis_index]))


NAMES = ("circle", "torus", "bs12", "genus2", "circle2")


def corpus() -> Dict[str, Fixture]:
    """Every fixture under its default xi, plus BS(1,2) under the opposite xi."""
    out = {n: fixture(n) for n in NAMES}
    out["bs12-neg"] = fixture("bs12", XiOrder([[-1]]))
    out["torus-neg"] = fixture("torus", XiOrder([[-1]]))
    out["circle-neg"] = fixture("circle", XiOrder([[-1]]))
    return out


def emit(name: str) -> str:
    """Canonical text of a presentation or fact-base fixture."""
    if name in FACT_TEXTS:
        return FACT_TEXTS[name]
    return format_presentation(presentation(name))


def emitted_files() -> Dict[str, str]:
    out = {f"{n}.pres": emit(n) for n in TEXTS}
    out.update({f"{n}.facts": emit(n) for n in FACT_TEXTS})
    return out
