from fractions import Fraction

import pytest

from oracles import brute_lowest_coeff_gcd, brute_monic_kernel, gauss_characterization
from novicat.complexes import CycleVector
from novicat.fixtures import corpus, fixture, surface_fixture
from novicat.groupring import LaurentPoly, SignPolicy, XiOrder, in_S_xi, parse_poly
from novicat.movability import (
    GENERIC, MonodromyPoint, Outcome, UnsupportedMonodromy, decide_movable_field, decide_movable_int,
    evaluate_obstruction, is_xi_algebraic_integer, search_certificate, verify_certificate,
    verify_field_certificate, verify_pairing, verify_verdict,
)

XI = XiOrder([[1]])
NEG = XiOrder([[-1]])
RATIONALS = [Fraction(2), Fraction(3), Fraction(-1), Fraction(1, 2), Fraction(2, 3), Fraction(-2), Fraction(5, 3)]


def P(text, rank=1):
    return parse_poly(text, rank)


# over Q

@pytest.mark.parametrize("xi", [XI, NEG])
def test_bs_field_movable(xi):
    f = fixture("bs12", xi)
    v = decide_movable_field(f.complex, f.cycle)
    assert v.movable
    assert v.x in (P("t - 2"), P("2 - t"))
    assert verify_field_certificate(f.complex, f.cycle, v.x, v.chain)


def test_circle_field_movable():
    f = fixture("circle")
    v = decide_movable_field(f.complex, f.cycle)
    assert v.movable and v.x in (P("1 - t"), P("t - 1"))


def test_genus2_field_not_movable():
    f = surface_fixture(2)
    v = decide_movable_field(f.complex, f.cycle)
    assert not v.movable
    assert verify_pairing(f.complex, v.witness)


# over Z, rank one

def test_bs_plus_not_movable():
    f = fixture("bs12")
    v = decide_movable_int(f.complex, f.cycle)
    assert v.outcome is Outcome.NOT_MOVABLE and v.d == 2
    assert verify_verdict(f.complex, f.cycle, v)


def test_bs_minus_movable():
    f = fixture("bs12", NEG)
    v = decide_movable_int(f.complex, f.cycle)
    assert v.outcome is Outcome.MOVABLE and v.delta == P("t - 2")
    assert f.complex.boundary(2).apply(v.chain) == [v.delta * c for c in f.cycle.coords]
    assert verify_verdict(f.complex, f.cycle, v)


def test_torus_movable():
    f = fixture("torus")
    v = decide_movable_int(f.complex, f.cycle)
    assert v.outcome is Outcome.MOVABLE and v.delta == P("1 - t")


def test_genus2_not_movable_with_witness():
    f = surface_fixture(2)
    v = decide_movable_int(f.complex, f.cycle)
    assert v.outcome is Outcome.NOT_MOVABLE and v.d == 0
    assert verify_verdict(f.complex, f.cycle, v)


def test_bs_brute_force_agrees():
    # no multiple of t - 2 of small support has lowest coefficient 1 under +xi
    assert brute_lowest_coeff_gcd(P("t - 2"), XI, degree=6, coeff=4) == 2
    assert search_certificate(fixture("bs12").complex, fixture("bs12").cycle, 6) is None


def test_sign_policies_agree_on_d_one():
    f = fixture("bs12", NEG)
    for policy in SignPolicy:
        v = decide_movable_int(f.complex, f.cycle, policy)
        assert v.outcome is Outcome.MOVABLE and in_S_xi(v.delta, NEG, policy)


def test_tampered_certificate_rejected():
    f = fixture("bs12", NEG)
    v = decide_movable_int(f.complex, f.cycle)
    assert not verify_certificate(f.complex, f.cycle, v.delta, tuple(2 * c for c in v.chain))
    assert not verify_certificate(f.complex, f.cycle, P("2 - t"), v.chain)


# bounded search

def test_search_circle2():
    f = fixture("circle2")
    found = search_certificate(f.complex, f.cycle, 1)
    assert found is not None
    delta, chain = found
    assert delta == P("1 - t1", 2)
    assert verify_certificate(f.complex, f.cycle, delta, chain)


def test_search_zero_class():
    f = fixture("torus")
    z = CycleVector(1, (LaurentPoly.zero(1), LaurentPoly.zero(1)))
    delta, _ = search_certificate(f.complex, z, 2)
    assert delta == P("1 + t")
    v = decide_movable_int(f.complex, z)
    assert v.outcome is Outcome.MOVABLE


def test_rank_two_is_search_only():
    f = fixture("circle2")
    v = decide_movable_int(f.complex, f.cycle, box=1)
    assert v.outcome is Outcome.MOVABLE and v.box == 1


# algebraic integers

@pytest.mark.parametrize("x, xi, want", [
    (2, XI, True),
    (Fraction(1, 2), XI, False),
    (2, NEG, False),
    (Fraction(1, 2), NEG, True),
    (-1, XI, True),
    (Fraction(2, 3), XI, False),
])
def test_algebraic_integer_examples(x, xi, want):
    assert is_xi_algebraic_integer(MonodromyPoint((x,)), xi) is want


@pytest.mark.parametrize("x", [2, 3, -1, Fraction(1, 2), Fraction(2, 3)])
@pytest.mark.parametrize("sign", [1, -1])
def test_algebraic_integer_vs_brute_force(x, sign):
    got = is_xi_algebraic_integer(MonodromyPoint((x,)), XiOrder([[sign]]))
    assert got == gauss_characterization(x, sign) == brute_monic_kernel(x, sign)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_generic_is_not_algebraic_integer(r):
    xi = XiOrder([[1] * r] + [[int(i == j) for j in range(r)] for i in range(r)])
    assert not is_xi_algebraic_integer(MonodromyPoint.generic(r), xi)


def test_mixed_monodromy_unsupported():
    xi = XiOrder([[1, 0], [0, 1]])
    with pytest.raises(UnsupportedMonodromy):
        is_xi_algebraic_integer(MonodromyPoint((GENERIC, Fraction(2))), xi)


def test_monodromy_parse():
    assert MonodromyPoint.parse("generic, 1/2").as_strings() == ["generic", "1/2"]
    with pytest.raises(ValueError):
        MonodromyPoint((0,))


# the pairing obstruction

def test_genus2_obstruction():
    f = surface_fixture(2)
    res = evaluate_obstruction(f.complex, f.cycle, MonodromyPoint.generic(1))
    assert res.image_nonzero and res.not_movable and res.algebraic_integer is False
    assert verify_pairing(f.complex, res.witness)


def test_bs_minus_excluded_bundle():
    f = fixture("bs12", NEG)
    res = evaluate_obstruction(f.complex, f.cycle, MonodromyPoint((2,)))
    assert not res.image_nonzero and not res.not_movable


def test_torus_generic_image_zero():
    f = fixture("torus")
    res = evaluate_obstruction(f.complex, f.cycle, MonodromyPoint.generic(1))
    assert not res.image_nonzero and not res.not_movable


def test_witness_tampering_detected():
    from dataclasses import replace
    from novicat.exactalg.linalg import FracScalar
    f = surface_fixture(2)
    w = evaluate_obstruction(f.complex, f.cycle, MonodromyPoint.generic(1)).witness
    assert not verify_pairing(f.complex, replace(w, value=w.value + FracScalar(LaurentPoly.one(1))))


def _movable_fixtures():
    out = []
    for name, f in corpus().items():
        v = decide_movable_int(f.complex, f.cycle, box=1)
        if v.outcome is Outcome.MOVABLE:
            out.append((name, f))
    return out


def test_obstruction_consistency_on_movable_fixtures():
    movable = _movable_fixtures()
    assert {n for n, _ in movable} >= {"circle", "torus", "bs12-neg", "circle2"}
    for name, f in movable:
        monos = [MonodromyPoint.generic(f.complex.rank)]
        if f.complex.rank == 1:
            monos += [MonodromyPoint((x,)) for x in RATIONALS]
        for mono in monos:
            res = evaluate_obstruction(f.complex, f.cycle, mono)
            if res.algebraic_integer is False:
                assert not res.image_nonzero, (name, mono)


def test_integral_implies_rational():
    for name, f in corpus().items():
        v = decide_movable_int(f.complex, f.cycle, box=1)
        if v.outcome is Outcome.MOVABLE:
            assert decide_movable_field(f.complex, f.cycle).movable, name


def test_direction_sensitivity():
    plus = decide_movable_int(fixture("bs12").complex, fixture("bs12").cycle)
    minus = decide_movable_int(fixture("bs12", NEG).complex, fixture("bs12", NEG).cycle)
    assert plus.movable is False and minus.movable is True
