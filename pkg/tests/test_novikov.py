from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import polys
from novicat.complexes import EquivariantChainComplex
from novicat.fixtures import fixture
from novicat.groupring import LaurentPoly, XiOrder, parse_poly, xi_lowest_term
from novicat.matrix import PolyMatrix
from novicat.novikov import (
    CertificateError, CyclicKind, NonUnit, NovikovSeries, UnboundedSupport, XiMismatch, build_infinite_chain,
    chain_spread, check_diagonalization, classify_cyclic, nov_add, nov_invert, nov_mul, truncate,
    truncated_diagonalize,
)

XI = XiOrder([[1]])
NEG = XiOrder([[-1]])


def P(text, rank=1):
    return parse_poly(text, rank)


def S(text, cutoff, xi=XI):
    return NovikovSeries(P(text), cutoff, xi)


def test_product_example():
    out = nov_mul(S("1 - t", 5), S("1 + t", 5))
    assert out.body == P("1 - t^2")
    assert out.cutoff == 5


def test_sum_truncates():
    out = nov_add(S("1", 3), S("t^4", 10))
    assert out.body == P("1") and out.cutoff == 3


def test_product_cutoff_rule():
    # valuations 1 and 2: the product is known below min(4 + 2, 4 + 1)
    out = nov_mul(S("2*t", 4), S("3*t^2", 4))
    assert out.body == P("6*t^3")
    assert out.cutoff == 5


def test_xi_mismatch():
    with pytest.raises(XiMismatch):
        nov_add(S("1", 3), S("1", 3, NEG))


@pytest.mark.parametrize("u, cutoff, want, want_cut", [
    ("1 - t", 4, "1 + t + t^2 + t^3", 4),
    ("t - t^2", 3, "t^-1 + 1 + t + t^2", 3),
])
def test_inversion_examples(u, cutoff, want, want_cut):
    inv = nov_invert(NovikovSeries.exact(P(u), XI), cutoff)
    assert inv.body == P(want)
    assert inv.cutoff == want_cut


def test_inversion_non_unit():
    with pytest.raises(NonUnit) as err:
        nov_invert(NovikovSeries.exact(P("2 - t"), XI), 4)
    assert err.value.coefficient == 2


def test_A0_requires_exponent_zero():
    with pytest.raises(NonUnit):
        nov_invert(NovikovSeries.exact(P("t - t^2"), XI), 4, ring="A0")


def test_unbounded_support():
    # under a rank-two order with first row (1, 0) the ratio t2 never gains first-coordinate value
    xi = XiOrder([[1, 0], [0, 1]])
    with pytest.raises(UnboundedSupport):
        nov_invert(NovikovSeries.exact(P("1 - t2", 2), xi), 3)


def _as_unit(p, xi):
    c, _ = xi_lowest_term(p, xi)
    if c not in (1, -1):
        p = p + LaurentPoly.monomial(min(p.support(), key=xi.value)) * (1 - c)
    return p


@given(polys(1, nonzero=True, exp_range=3), st.integers(1, 8), st.sampled_from([XI, NEG]))
def test_inverse_property(p, cutoff, xi):
    u = NovikovSeries.exact(_as_unit(p, xi), xi)
    inv = nov_invert(u, cutoff)
    one = NovikovSeries.exact(LaurentPoly.one(1), xi)
    assert (u * inv).agrees_with(one)
    assert (u * inv).cutoff >= cutoff + min(xi.first(e) for e in u.body.support())


@given(polys(1, exp_range=4), polys(1, exp_range=4), st.integers(-3, 6), st.integers(-3, 6))
def test_truncated_product_is_sound(p, q, tp, tq):
    a = NovikovSeries(p, tp, XI)
    b = NovikovSeries(q, tq, XI)
    out = nov_mul(a, b)
    assert truncate(out.body - p * q, XI, out.cutoff).is_zero()


@pytest.mark.parametrize("a, g, alpha, kind", [
    ("2 - t", (0,), 2, CyclicKind.SECOND),
    ("t - 3*t^2", (1,), 1, CyclicKind.FIRST),
    ("1 + t", (0,), 1, CyclicKind.UNIT),
])
def test_classify_cyclic(a, g, alpha, kind):
    c = classify_cyclic(P(a), XI)
    assert (c.g, c.alpha, c.kind) == (g, alpha, kind)


def test_first_kind_module_vanishes_after_inversion():
    # a = t(1 - 3t): the factor 1 - 3t is a unit, leaving A0 / (t)
    a = NovikovSeries.exact(P("t - 3*t^2"), XI)
    unit = nov_invert(NovikovSeries.exact(P("1 - 3*t"), XI), 10)
    assert (a * unit).agrees_with(NovikovSeries.exact(P("t"), XI))


@pytest.mark.parametrize("name, diag", [
    ("bs12", {1: "t - 1", 2: "t - 2"}),
    ("torus", {1: "t - 1", 2: "t - 1"}),
])
def test_diagonalize_fixtures(name, diag):
    C = fixture(name).complex
    d = truncated_diagonalize(C, 8)
    assert d.complete
    assert {q: b.diagonal[0].body for q, b in d.blocks.items()} == {q: P(v) for q, v in diag.items()}
    assert check_diagonalization(C, d)


def test_diagonalize_identity():
    M = PolyMatrix(1, 1, {(0, 0): LaurentPoly.one(1)}, 1)
    C = EquivariantChainComplex(1, XI, (1, 1), {1: M}, (("a",), ("b",)), "id")
    d = truncated_diagonalize(C, 5)
    assert d.complete and d.mu(1) == 1
    assert check_diagonalization(C, d)


def test_diagonalize_surface_product():
    from novicat.complexes import product_complex
    c = fixture("circle").complex
    C = product_complex(c, fixture("torus").complex)
    d = truncated_diagonalize(C, 6)
    assert check_diagonalization(C, d)


# chains

def test_circle_chain():
    f = fixture("circle")
    out = build_infinite_chain(f.complex, f.cycle, P("1 - t"), [P("-1")], 10)
    assert out.chain == (-sum((LaurentPoly.monomial((i,)) for i in range(10)), LaurentPoly.zero(1)),)
    assert out.spread == 1
    assert out.terms() == 10


def test_bs_chain_coefficients():
    f = fixture("bs12", NEG)
    out = build_infinite_chain(f.complex, f.cycle, P("t - 2"), [P("1")], 5)
    want = LaurentPoly({(-i,): 2 ** (i - 1) for i in range(1, 6)}, 1)
    assert out.chain == (truncate(want, NEG, 5),)
    assert [out.chain[0].coefficient((-i,)) for i in range(1, 5)] == [1, 2, 4, 8]


def test_torus_chain():
    f = fixture("torus")
    out = build_infinite_chain(f.complex, f.cycle, P("1 - t"), [P("-1")], 6)
    assert all(abs(c) == 1 for _, c in out.chain[0].items())


def test_chain_rejects_bad_certificate():
    f = fixture("bs12")
    with pytest.raises(CertificateError):
        build_infinite_chain(f.complex, f.cycle, P("t - 2"), [P("1")], 5)
    with pytest.raises(CertificateError):
        build_infinite_chain(fixture("bs12", NEG).complex, f.cycle, P("t - 2"), [P("2")], 5)


@pytest.mark.parametrize("name, xi, delta, c1", [
    ("circle", XI, "1 - t", "-1"),
    ("torus", XI, "1 - t", "-1"),
    ("bs12", NEG, "t - 2", "1"),
])
@pytest.mark.parametrize("cutoff", [5, 10, 20])
def test_residual_support(name, xi, delta, c1, cutoff):
    f = fixture(name, xi)
    out = build_infinite_chain(f.complex, f.cycle, P(delta), [P(c1)], cutoff)
    s = chain_spread(f.complex, [P(c1)], f.cycle.degree)
    low = out.residual_valuation(f.complex.xi)
    assert low is None or low >= cutoff - s
    assert out.certified_from == Fraction(cutoff) - s
