"""Strong Groebner bases for submodules of Z[x_1..x_n]^m.

Terms are keyed by ``(position, e_1, ..., e_n)``; comparing these tuples
directly gives a position-over-term order with lex on the exponents, so the
lead term of an element is simply its largest key.  Coefficients are Python
ints.  Reduction of a lead coefficient uses floor division against positive
basis lead coefficients, and pair completion uses both S- and G-polynomials,
which together yield a strong basis over Z.
"""
from __future__ import annotations

from math import gcd
from typing import Callable, Dict, List, Optional, Sequence, Tuple

Key = Tuple[int, ...]
Vec = Dict[Key, int]
Poly = Dict[Tuple[int, ...], int]
Cofactors = Dict[int, Poly]


class Cancelled(RuntimeError):
    pass


def lead(f: Vec) -> Key:
    return max(f)


def _ext_gcd(a: int, b: int) -> Tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _shift_vec(f: Vec, mono: Tuple[int, ...], c: int) -> Vec:
    return {(k[0],) + tuple(a + b for a, b in zip(k[1:], mono)): c * v for k, v in f.items()}


def _shift_poly(f: Poly, mono: Tuple[int, ...], c: int) -> Poly:
    return {tuple(a + b for a, b in zip(k, mono)): c * v for k, v in f.items()}


def _axpy(acc: dict, other: dict) -> dict:
    for k, v in other.items():
        nv = acc.get(k, 0) + v
        if nv:
            acc[k] = nv
        else:
            acc.pop(k, None)
    return acc


def _cof_axpy(acc: Cofactors, other: Cofactors, mono: Tuple[int, ...], c: int) -> Cofactors:
    for idx, p in other.items():
        cur = acc.setdefault(idx, {})
        _axpy(cur, _shift_poly(p, mono, c))
        if not cur:
            del acc[idx]
    return acc


def _divides(a: Key, b: Key) -> bool:
    return a[0] == b[0] and all(x <= y for x, y in zip(a[1:], b[1:]))


def _lcm(a: Key, b: Key) -> Tuple[int, ...]:
    return tuple(max(x, y) for x, y in zip(a[1:], b[1:]))


def _quot(a: Tuple[int, ...], b: Key) -> Tuple[int, ...]:
    return tuple(x - y for x, y in zip(a, b[1:]))


class Element:
    __slots__ = ("vec", "cof")

    def __init__(self, vec: Vec, cof: Optional[Cofactors]):
        self.vec = vec
        self.cof = cof

    def copy(self) -> "Element":
        cof = None if self.cof is None else {i: dict(p) for i, p in self.cof.items()}
        return Element(dict(self.vec), cof)

    def add_multiple(self, other: "Element", mono: Tuple[int, ...], c: int) -> None:
        _axpy(self.vec, _shift_vec(other.vec, mono, c))
        if self.cof is not None and other.cof is not None:
            _cof_axpy(self.cof, other.cof, mono, c)

    def scale(self, c: int) -> None:
        self.vec = {k: c * v for k, v in self.vec.items()}
        if self.cof is not None:
            self.cof = {i: {k: c * v for k, v in p.items()} for i, p in self.cof.items()}

    def normalize_sign(self) -> None:
        if self.vec and self.vec[lead(self.vec)] < 0:
            self.scale(-1)


def top_reduce(h: Element, basis: Sequence[Element], full: bool = False) -> Element:
    """Reduce lead terms of h (and all terms when ``full``) by the basis."""
    h = h.copy()
    done: Vec = {}
    while h.vec:
        lt = lead(h.vec)
        c = h.vec[lt]
        progressed = False
        for g in basis:
            lg = lead(g.vec)
            if not _divides(lg, lt):
                continue
            q = c // g.vec[lg]
            if q == 0:
                continue
            h.add_multiple(g, _quot(lt[1:], lg), -q)
            progressed = True
            break
        if progressed:
            continue
        if not full:
            break
        done[lt] = c
        del h.vec[lt]
    if full:
        h.vec.update(done)
    return h


def _pair_elements(f: Element, g: Element) -> List[Element]:
    lf, lg = lead(f.vec), lead(g.vec)
    if lf[0] != lg[0]:
        return []
    a, b = f.vec[lf], g.vec[lg]
    m = _lcm(lf, lg)
    mf, mg = _quot(m, lf), _quot(m, lg)
    out = []
    L = a * b // gcd(a, b)
    s = Element({}, {} if f.cof is not None else None)
    s.add_multiple(f, mf, L // a)
    s.add_multiple(g, mg, -(L // b))
    out.append(s)
    if a % b and b % a:
        d, u, v = _ext_gcd(a, b)
        gp = Element({}, {} if f.cof is not None else None)
        gp.add_multiple(f, mf, u)
        gp.add_multiple(g, mg, v)
        out.append(gp)
    return out


def _strongly_divides(g: Element, f: Element) -> bool:
    lg, lf = lead(g.vec), lead(f.vec)
    return _divides(lg, lf) and f.vec[lf] % g.vec[lg] == 0


def groebner(gens: Sequence[Vec], track: bool = True, cancel: Callable[[], bool] | None = None,
             max_pairs: int = 200000) -> List[Element]:
    """Reduced strong Groebner basis; with ``track`` each element records cofactors over ``gens``."""
    nvars = None
    basis: List[Element] = []
    for i, g in enumerate(gens):
        if not g:
            continue
        if nvars is None:
            nvars = len(next(iter(g))) - 1
        e = Element(dict(g), {i: {(0,) * nvars: 1}} if track else None)
        e.normalize_sign()
        basis.append(e)
    if not basis:
        return []
    pairs = [(i, j) for j in range(len(basis)) for i in range(j)]
    processed = 0
    while pairs:
        if cancel is not None and cancel():
            raise Cancelled("groebner basis computation cancelled")
        processed += 1
        if processed > max_pairs:
            raise RuntimeError("groebner pair limit exceeded")
        pairs.sort(key=lambda p: (_lcm(lead(basis[p[0]].vec), lead(basis[p[1]].vec)), p))
        i, j = pairs.pop(0)
        for h in _pair_elements(basis[i], basis[j]):
            h = top_reduce(h, basis)
            if h.vec:
                h.normalize_sign()
                pairs.extend((k, len(basis)) for k in range(len(basis)))
                basis.append(h)
    return _minimalize(basis)


def _minimalize(basis: List[Element]) -> List[Element]:
    keep: List[Element] = []
    for idx, g in enumerate(basis):
        redundant = False
        for jdx, f in enumerate(basis):
            if jdx == idx:
                continue
            if _strongly_divides(f, g):
                lf, lg = lead(f.vec), lead(g.vec)
                if (lf, f.vec[lf]) != (lg, g.vec[lg]) or jdx < idx:
                    redundant = True
                    break
        if not redundant:
            keep.append(g)
    out = []
    for i, g in enumerate(keep):
        others = keep[:i] + keep[i + 1:]
        red = _reduce_tail(g, others)
        red.normalize_sign()
        out.append(red)
    out.sort(key=lambda e: (lead(e.vec), e.vec[lead(e.vec)]))
    return out


def _reduce_tail(g: Element, others: Sequence[Element]) -> Element:
    """Reduce every non-lead term of g as far as the others allow."""
    g = g.copy()
    lt = lead(g.vec)
    changed = True
    while changed:
        changed = False
        for k in sorted(g.vec, reverse=True):
            if k == lt or k not in g.vec:
                continue
            c = g.vec[k]
            for f in others:
                lf = lead(f.vec)
                if lf < lt and _divides(lf, k):
                    q = c // f.vec[lf]
                    if q:
                        g.add_multiple(f, _quot(k[1:], lf), -q)
                        changed = True
                        break
            if changed:
                break
    return g


def reduce_to_zero(f: Vec, basis: Sequence[Element], track: bool = False) -> Tuple[bool, Optional[Cofactors]]:
    """Membership test; when ``track`` the returned cofactors express f over the basis indices."""
    if not f:
        return True, {} if track else None
    nvars = len(next(iter(f))) - 1
    tagged = []
    for i, g in enumerate(basis):
        tagged.append(Element(g.vec, {i: {(0,) * nvars: 1}} if track else None))
    h = Element(dict(f), {} if track else None)
    h = top_reduce(h, tagged)
    if h.vec:
        return False, None
    if not track:
        return True, None
    return True, {i: {k: -v for k, v in p.items()} for i, p in h.cof.items()}
