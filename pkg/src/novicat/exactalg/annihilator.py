"""Annihilator ideals in Lambda = Z[t, 1/t] and their lowest-coefficient ideals.

Laurent data is moved into Z[s, t] by the substitution t^-1 -> s together
with the relation ts - 1.  With lex order s > t, basis elements whose lead
term is free of s generate the contraction of the Laurent ideal to Z[t].
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ..groupring import LaurentPoly, XiOrder
from ..matrix import PolyMatrix
from . import groebner as gb


class NotACycle(ValueError):
    pass


class NotABoundary(ArithmeticError):
    pass


class NotIntegral(ValueError):
    pass


def _int(c) -> int:
    if getattr(c, "denominator", 1) != 1:
        raise NotIntegral(f"coefficient {c} is not an integer")
    return int(c)


def _to_st(p: LaurentPoly) -> Dict[Tuple[int, int], int]:
    """Laurent polynomial in t -> polynomial in (s, t) with s standing for 1/t."""
    out: Dict[Tuple[int, int], int] = {}
    for (e,), c in p.items():
        key = (-e, 0) if e < 0 else (0, e)
        out[key] = out.get(key, 0) + _int(c)
    return out


def _from_st(p: Dict[Tuple[int, int], int]) -> LaurentPoly:
    acc: Dict[Tuple[int], int] = {}
    for (es, et), c in p.items():
        k = (et - es,)
        acc[k] = acc.get(k, 0) + c
    return LaurentPoly(acc, 1)


def _ts_minus_one(pos: int) -> Dict[Tuple[int, int, int], int]:
    return {(pos, 1, 1): 1, (pos, 0, 0): -1}


def _embed(vec: Sequence[LaurentPoly], offset: int) -> Dict[Tuple[int, int, int], int]:
    out = {}
    for i, p in enumerate(vec):
        for (es, et), c in _to_st(p).items():
            if c:
                out[(i + offset, es, et)] = c
    return out


def _poly_t(g: gb.Element, pos: int = 0) -> LaurentPoly:
    return LaurentPoly({(et,): c for (p, es, et), c in g.vec.items() if p == pos}, 1)


@dataclass(frozen=True)
class IdealBasisRank1:
    """Strong Groebner basis (over Z, in Z[t]) of the contraction of a Laurent ideal.

    ``chains`` is filled for annihilator ideals: ``chains[i]`` bounds
    ``generators[i] * z``.
    """

    generators: Tuple[LaurentPoly, ...]
    chains: Optional[Tuple[Tuple[LaurentPoly, ...], ...]] = None

    def is_zero(self) -> bool:
        return not self.generators

    def _elements(self) -> List[gb.Element]:
        return [gb.Element({(0, 0, e[0]): _int(c) for e, c in g.items()}, None) for g in self.generators]

    def express(self, f: LaurentPoly) -> Optional[Tuple[int, List[LaurentPoly]]]:
        """(k, q) with t^k f = sum q_i g_i and q_i in Z[t], or None when f is not a member."""
        if f.is_zero():
            return 0, [LaurentPoly.zero(1)] * len(self.generators)
        if self.is_zero():
            return None
        pn, m = f.normalized()
        vec = {(0, 0, e[0]): _int(c) for e, c in pn.items()}
        ok, cof = gb.reduce_to_zero(vec, self._elements(), track=True)
        if not ok:
            return None
        q = []
        for i in range(len(self.generators)):
            p = cof.get(i, {})
            q.append(LaurentPoly({(et,): c for (es, et), c in p.items()}, 1))
        return -m[0], q

    def contains(self, f: LaurentPoly) -> bool:
        return self.express(f) is not None


def _saturated_basis(gens: Sequence[Dict], pos: int, track: bool, cancel) -> List[gb.Element]:
    basis = gb.groebner(gens, track=track, cancel=cancel)
    return [g for g in basis if gb.lead(g.vec)[0] == pos and gb.lead(g.vec)[1] == 0]


def groebner_rank1(gens: Sequence[LaurentPoly], cancel: Callable[[], bool] | None = None) -> IdealBasisRank1:
    vecs = [{(0,) + k: c for k, c in _to_st(g).items() if c} for g in gens if not g.is_zero()]
    if not vecs:
        return IdealBasisRank1(())
    vecs.append(_ts_minus_one(0))
    basis = _saturated_basis(vecs, 0, False, cancel)
    return IdealBasisRank1(tuple(_poly_t(g) for g in basis))


def annihilator_rank1(C, z, cancel: Callable[[], bool] | None = None) -> IdealBasisRank1:
    """Ann of the class of z in H_q(C) as an ideal of Lambda, with bounding chains.

    Works on the submodule of Lambda^n (+) Lambda generated by (z, 1), the
    columns (b_j, 0) of the next boundary, and (ts - 1) e_i; its elements
    with vanishing chain part are (0, f) with f z a boundary.
    """
    if C.rank != 1:
        raise ValueError("annihilator_rank1 needs a rank-one cover")
    if not C.is_cycle(z):
        raise NotACycle(f"vector in degree {z.degree} is not a cycle")
    q = z.degree
    n = C.dim(q)
    d = C.boundary(q + 1)
    gens = [_embed(z.coords, 1)]
    gens[0][(0, 0, 0)] = 1
    for j in range(d.ncols):
        gens.append(_embed(d.column(j), 1))
    for i in range(n):
        gens.append(_ts_minus_one(i + 1))
    basis = _saturated_basis(gens, 0, True, cancel)
    polys, chains = [], []
    for g in basis:
        f = _poly_t(g)
        chain = []
        for j in range(d.ncols):
            p = g.cof.get(1 + j, {})
            chain.append(-_from_st(p))
        chain = tuple(chain)
        if d.apply(chain) != [f * c for c in z.coords]:
            raise ArithmeticError("internal error: annihilator cofactor does not bound")
        polys.append(f)
        chains.append(chain)
    return IdealBasisRank1(tuple(polys), tuple(chains))


def lowest_coeff_ideal(I: IdealBasisRank1, xi: XiOrder) -> int:
    """Nonnegative generator of the ideal of xi-lowest coefficients of I (with 0)."""
    d, _ = _lowest_coeff_bezout(I, xi)
    return d


def _lowest_coeff_bezout(I: IdealBasisRank1, xi: XiOrder) -> Tuple[int, List[int]]:
    if xi.rank != 1:
        raise ValueError("lowest_coeff_ideal needs rank one")
    if I.is_zero():
        return 0, []
    if xi.sign((1,)) > 0:
        vals = [_int(g.coefficient((0,))) for g in I.generators]
    else:
        vals = [_int(g.coefficient(g.max_exponent())) for g in I.generators]
    d, coeffs = 0, []
    for v in vals:
        g, a, b = gb._ext_gcd(d, v) if v or d else (0, 1, 0)
        coeffs = [a * c for c in coeffs] + [b]
        d = g
    if d < 0:
        d, coeffs = -d, [-c for c in coeffs]
    return d, coeffs


@dataclass(frozen=True)
class Rank1Certificate:
    delta: LaurentPoly
    chain: Optional[Tuple[LaurentPoly, ...]]


def movable_certificate(I: IdealBasisRank1, xi: XiOrder) -> Optional[Rank1Certificate]:
    """An element of I with xi-lowest coefficient exactly 1, when one exists."""
    d, u = _lowest_coeff_bezout(I, xi)
    if d != 1:
        return None
    one = LaurentPoly.one(1)
    top = max(g.max_exponent()[0] for g in I.generators)
    delta = LaurentPoly.zero(1)
    chain = None
    if I.chains is not None:
        chain = [LaurentPoly.zero(1)] * len(I.chains[0])
    for ui, g, k in zip(u, I.generators, range(len(u))):
        if not ui:
            continue
        mono = one if xi.sign((1,)) > 0 else LaurentPoly.monomial((top - g.max_exponent()[0],))
        delta = delta + g * mono * ui
        if chain is not None:
            chain = [a + b * mono * ui for a, b in zip(chain, I.chains[k])]
    return Rank1Certificate(delta, None if chain is None else tuple(chain))


def solve_bounding_chain(C, z, delta: LaurentPoly, ann: IdealBasisRank1 | None = None) -> Tuple[LaurentPoly, ...]:
    """A chain c with d c = delta * z over Lambda (rank one, exact)."""
    if ann is None:
        ann = annihilator_rank1(C, z)
    found = ann.express(delta)
    if found is None:
        raise NotABoundary(f"({delta}) * z is not a boundary")
    k, q = found
    n = C.dim(z.degree + 1)
    chain = [LaurentPoly.zero(1)] * n
    for qi, ch in zip(q, ann.chains):
        chain = [a + qi * b for a, b in zip(chain, ch)]
    shift = LaurentPoly.monomial((-k,))
    chain = tuple(c * shift for c in chain)
    if C.boundary(z.degree + 1).apply(chain) != [delta * c for c in z.coords]:
        raise ArithmeticError("internal error: solved chain does not bound")
    return chain
