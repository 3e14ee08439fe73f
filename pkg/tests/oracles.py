"""Independent reference computations used by the tests (sympy and brute force)."""
from __future__ import annotations

import itertools
from math import gcd

import sympy
from sympy.polys.matrices import DomainMatrix

from novicat.groupring import LaurentPoly, XiOrder, xi_lowest_term


def gcd_of_minors(M):
    """Invariant factors d_k = D_k / D_{k-1} where D_k is the gcd of all k x k minors."""
    m = len(M)
    n = len(M[0]) if m else 0
    S = sympy.Matrix(M) if m and n else None
    D = [1]
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = gcd(g, int(S.extract(list(rows), list(cols)).det()))
        if g == 0:
            break
        D.append(g)
    return tuple(D[i] // D[i - 1] for i in range(1, len(D)))


def to_sympy(p: LaurentPoly, syms):
    out = 0
    for e, c in p.items():
        term = sympy.Rational(c.numerator, c.denominator) if hasattr(c, "denominator") else sympy.Integer(c)
        for s, k in zip(syms, e):
            term *= s ** k
        out += term
    return out


def sympy_frac_rank(rows, rank: int) -> int:
    if not rows or not rows[0]:
        return 0
    syms = sympy.symbols(f"t1:{rank + 1}")
    K = sympy.QQ.frac_field(*syms)
    data = [[K.convert(to_sympy(x, syms)) for x in row] for row in rows]
    return DomainMatrix(data, (len(rows), len(rows[0])), K).rank()


def brute_lowest_coeff_gcd(f: LaurentPoly, xi: XiOrder, degree: int = 3, coeff: int = 3) -> int:
    """gcd of xi-lowest coefficients of g * f over all g with small support and coefficients."""
    d = 0
    exps = range(-degree, degree + 1)
    for e in exps:
        for c in range(1, coeff + 1):
            for e2 in exps:
                for c2 in range(-coeff, coeff + 1):
                    g = LaurentPoly({(e,): c}, 1) + LaurentPoly({(e2,): c2}, 1)
                    if g.is_zero():
                        continue
                    d = gcd(d, int(xi_lowest_term(g * f, xi)[0]))
    return d


def brute_S_xi_annihilator(f: LaurentPoly, xi: XiOrder, degree: int, coeff: int) -> bool:
    """Search g * f with xi-lowest coefficient 1 for g of degree <= ``degree`` in t (and t^-1)."""
    exps = range(-degree, degree + 1)
    for lo in exps:
        for rest in itertools.product(range(-coeff, coeff + 1), repeat=2):
            g = LaurentPoly({(lo,): 1}, 1) + LaurentPoly({(lo + 1,): rest[0], (lo - 1,): rest[1]}, 1)
            if not g.is_zero() and xi_lowest_term(g * f, xi)[0] == 1:
                return True
    return False


def brute_monic_kernel(x, top_sign: int, degree: int = 4, coeff: int = 4) -> bool:
    """Is there an integer polynomial P of degree <= ``degree`` with P(x) = 0 and xi-top coefficient 1?

    The monodromy sends t to x.  With xi(t) > 0 the xi-top term is the highest
    power of t; with xi(t) < 0 it is the lowest.
    """
    from fractions import Fraction

    v = Fraction(x)
    for deg in range(1, degree + 1):
        for coeffs in itertools.product(range(-coeff, coeff + 1), repeat=deg):
            # coefficients of t^0 .. t^deg; the xi-top one is fixed to 1
            full = list(coeffs) + [1] if top_sign > 0 else [1] + list(coeffs)
            if full[-1] == 0 or full[0] == 0:
                continue
            if sum(c * v ** i for i, c in enumerate(full)) == 0:
                return True
    return False


def gauss_characterization(x, top_sign: int) -> bool:
    """Content argument: t - x divides P in Q[t]; Gauss's lemma pins the top coefficient."""
    from fractions import Fraction

    v = Fraction(x)
    # P = (den * t - num) * Q with Q integral, so the extreme coefficients of P are multiples
    lead, const = v.denominator, -v.numerator
    return abs(lead if top_sign > 0 else const) == 1
