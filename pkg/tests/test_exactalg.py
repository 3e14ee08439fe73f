import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import polys
from oracles import brute_lowest_coeff_gcd, gcd_of_minors, sympy_frac_rank
from novicat.complexes import CycleVector
from novicat.exactalg.annihilator import (
    annihilator_rank1, groebner_rank1, lowest_coeff_ideal, movable_certificate, solve_bounding_chain,
)
from novicat.exactalg.linalg import FracScalar, frac_kernel, frac_rank, frac_solve, homology_over_fraction_field
from novicat.exactalg.smith import integer_solve, matmul, smith_normal_form
from novicat.fixtures import fixture, surface_fixture
from novicat.groupring import LaurentPoly, XiOrder, in_S_xi, parse_poly, univariate_gcd
from novicat.matrix import PolyMatrix

XI = XiOrder([[1]])
NEG = XiOrder([[-1]])


def P(text, rank=1):
    return parse_poly(text, rank)


# Smith normal form

@pytest.mark.parametrize("M, factors", [
    ([[2, 4], [6, 8]], (2, 4)),
    ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], (1, 1, 1)),
    ([[0, 0], [0, 0]], ()),
])
def test_smith_examples(M, factors):
    assert smith_normal_form(M).factors == factors


int_matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=m, max_size=m)))


@given(int_matrices)
def test_smith_against_minors(M):
    snf = smith_normal_form(M)
    assert snf.factors == gcd_of_minors(M)
    assert [list(r) for r in snf.D] == matmul(matmul(snf.U, M), snf.V)
    for a, b in zip(snf.factors, snf.factors[1:]):
        assert b % a == 0


@given(int_matrices, st.data())
def test_integer_solve(M, data):
    x = data.draw(st.lists(st.integers(-5, 5), min_size=len(M[0]), max_size=len(M[0])))
    b = [sum(a * v for a, v in zip(row, x)) for row in M]
    y = integer_solve(M, b)
    assert y is not None
    assert [sum(a * v for a, v in zip(row, y)) for row in M] == b


def test_integer_solve_none():
    assert integer_solve([[2]], [1]) is None


# linear algebra over the fraction field

def test_frac_rank_examples():
    x1 = P("t - 1")
    z = LaurentPoly.zero(1)
    assert frac_rank([[x1], [z]], 1) == 1
    assert frac_kernel([[x1, z], [z, x1]], 1) == []


def test_frac_rank_torus():
    C = fixture("torus").complex
    assert frac_rank(C.boundary(1)) == 1
    assert frac_rank(C.boundary(2)) == 1


@pytest.mark.parametrize("g", [2, 3, 4])
def test_generic_betti(g):
    assert homology_over_fraction_field(surface_fixture(g).complex, 1).dimension == 2 * g - 2


def test_torsion_homology_dies():
    assert homology_over_fraction_field(fixture("torus").complex, 1).dimension == 0
    assert homology_over_fraction_field(fixture("circle").complex, 0).dimension == 0


poly_matrices = st.integers(1, 3).flatmap(
    lambda m: st.integers(1, 3).flatmap(
        lambda n: st.lists(st.lists(polys(2, max_terms=2, exp_range=2, coeff=3), min_size=n, max_size=n),
                           min_size=m, max_size=m)))


@settings(max_examples=60)
@given(poly_matrices)
def test_frac_rank_against_sympy(rows):
    assert frac_rank(rows, 2) == sympy_frac_rank(rows, 2)


@settings(max_examples=60)
@given(poly_matrices)
def test_kernel_is_kernel(rows):
    M = PolyMatrix.from_rows(rows, 2)
    basis = frac_kernel(M)
    assert len(basis) == M.ncols - frac_rank(rows, 2)
    for v in basis:
        assert all(x.is_zero() for x in M.apply(v))


@settings(max_examples=40)
@given(poly_matrices, st.data())
def test_frac_solve(rows, data):
    n = len(rows[0])
    x = data.draw(st.lists(polys(2, max_terms=2, exp_range=1), min_size=n, max_size=n))
    M = PolyMatrix.from_rows(rows, 2)
    b = M.apply(x)
    y = frac_solve(M, b)
    for row, bi in zip(rows, b):
        acc = FracScalar(LaurentPoly.zero(2))
        for a, yi in zip(row, y):
            acc = acc + FracScalar(a) * yi
        assert acc == FracScalar(bi)


def test_random_specialisation_bounds_rank():
    rng = random.Random(7)
    C = surface_fixture(3).complex
    rows = C.boundary(1).dense() + [[P("t") for _ in range(C.dim(1))]]
    generic = frac_rank(rows, 1)
    for _ in range(5):
        v = rng.randint(2, 50)
        ints = [[x.evaluate([v]) for x in row] for row in rows]
        assert smith_normal_form([[int(a) for a in r] for r in ints]).rank <= generic


# Groebner bases and ideals

@pytest.mark.parametrize("gens", [["t - 2", "t - 1"], ["2 - t", "3 - t^2"]])
def test_unit_ideals(gens):
    assert groebner_rank1([P(g) for g in gens]).contains(LaurentPoly.one(1))


def test_principal_ideal():
    I = groebner_rank1([P("t - 2")])
    assert len(I.generators) == 1
    assert I.generators[0] in (P("t - 2"), P("2 - t"))
    assert not I.contains(LaurentPoly.one(1))


def test_bezout_combination():
    assert P("2 - t") * P("2 + t") - P("3 - t^2") == LaurentPoly.one(1)


@settings(max_examples=60)
@given(st.lists(polys(1, nonzero=True, exp_range=2), min_size=1, max_size=3),
       st.lists(polys(1, exp_range=2, max_terms=2), min_size=3, max_size=3))
def test_membership_of_combinations(gens, cofs):
    I = groebner_rank1(gens)
    f = LaurentPoly.zero(1)
    for g, c in zip(gens, cofs):
        f = f + g * c
    found = I.express(f)
    assert found is not None
    k, q = found
    acc = LaurentPoly.zero(1)
    for qi, gi in zip(q, I.generators):
        acc = acc + qi * gi
    assert acc == f * LaurentPoly.monomial((k,))


@settings(max_examples=60)
@given(st.lists(polys(1, nonzero=True, exp_range=2), min_size=1, max_size=3), polys(1, nonzero=True, exp_range=3))
def test_membership_implies_rational_membership(gens, f):
    # over Q the ideal is principal, generated by the gcd
    g = gens[0]
    for h in gens[1:]:
        g = univariate_gcd(g, h)
    if groebner_rank1(gens).contains(f):
        from novicat.groupring import divides
        assert g.is_zero() or divides(g, f.to_rational())


# annihilators

def test_bs_annihilator():
    f = fixture("bs12")
    ann = annihilator_rank1(f.complex, f.cycle)
    assert ann.generators == (P("t - 2"),) or ann.generators == (P("2 - t"),)


def test_torus_annihilator():
    f = fixture("torus")
    ann = annihilator_rank1(f.complex, f.cycle)
    assert len(ann.generators) == 1 and ann.contains(P("t - 1")) and not ann.contains(LaurentPoly.one(1))


def test_generic_cycle_has_zero_annihilator():
    f = surface_fixture(2)
    assert annihilator_rank1(f.complex, f.cycle).is_zero()


def test_annihilator_chains_bound():
    f = fixture("bs12")
    ann = annihilator_rank1(f.complex, f.cycle)
    for g, chain in zip(ann.generators, ann.chains):
        assert f.complex.boundary(2).apply(chain) == [g * c for c in f.cycle.coords]


@pytest.mark.parametrize("gens, xi, d", [
    (["t - 2"], XI, 2),
    (["t - 2"], NEG, 1),
    (["2 - t", "3 - t^2"], XI, 1),
    ([], XI, 0),
])
def test_lowest_coeff_ideal(gens, xi, d):
    assert lowest_coeff_ideal(groebner_rank1([P(g) for g in gens]), xi) == d


def test_bs_brute_force_has_no_unit_lowest_coefficient():
    # every g * (t - 2) has even lowest coefficient under +xi
    assert brute_lowest_coeff_gcd(P("t - 2"), XI, degree=6, coeff=4) == 2


@settings(max_examples=40)
@given(polys(1, nonzero=True, exp_range=2, coeff=4), st.sampled_from([XI, NEG]))
def test_lowest_coeff_principal_vs_brute_force(f, xi):
    assert lowest_coeff_ideal(groebner_rank1([f]), xi) == brute_lowest_coeff_gcd(f, xi, degree=2, coeff=2)


@pytest.mark.parametrize("gens, xi", [(["t - 2"], NEG), (["2 - t", "3 - t^2"], XI), (["t - 1"], XI)])
def test_movable_certificate(gens, xi):
    I = groebner_rank1([P(g) for g in gens])
    cert = movable_certificate(I, xi)
    assert cert is not None
    assert in_S_xi(cert.delta, xi)
    assert I.contains(cert.delta)


def test_solve_bounding_chain():
    f = fixture("bs12")
    delta = P("t - 2") * P("1 + t^3")
    chain = solve_bounding_chain(f.complex, f.cycle, delta)
    assert f.complex.boundary(2).apply(chain) == [delta * c for c in f.cycle.coords]


def test_not_a_cycle():
    from novicat.exactalg.annihilator import NotACycle
    C = fixture("torus").complex
    with pytest.raises(NotACycle):
        annihilator_rank1(C, CycleVector(1, (P("1"), LaurentPoly.zero(1))))
