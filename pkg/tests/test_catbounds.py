import time

import pytest
from hypothesis import given, settings, strategies as st

from novicat.catbounds.expr import Atom, Cap, Cross, Dual, IllTyped, Push, Space, WedgeSum, parse_expr
from novicat.catbounds.factbase import parse_factbase, run_factbase
from novicat.catbounds.ledger import (
    LOWER, UPPER, BoundError, BoundLedger, ObstructionPairing, PairingDeclaration, ProductHypothesis,
    RejectedBundle, cat1_lower_bound, cat_lower_bound, ccat1_upper_bounds, point_class_weight, replay,
)
from novicat.catbounds.surfaces import (
    PatternError, SurfacePattern, all_patterns, parse_pattern, surface_products_table,
)
from novicat.catbounds.weights import (
    CWGT_EXACT, CWGT_LOWER, INF, SWGT_LOWER, WeightFact, propagate_weights, replay_trace, strict_weight,
)
from novicat.complexes import InputError
from novicat.fixtures import FACT_TEXTS

SIGMA = Space("S", 2, True, True, True)
TORUS = Space("T", 2, True, True, True)
RP4 = Space("RP4", 4, True, False, True)


def surface_atoms(space=SIGMA, suffix=""):
    z = Atom("z" + suffix, 1, True, space)
    u = Atom("u" + suffix, 1, False, space)
    return z, u


def fact(e, kind, v):
    return WeightFact(e, kind, v, ())


# weights

def test_kfold_cross():
    zs = [Atom(f"z{i}", 1, True, Space(f"S{i}", 2, True, True, True)) for i in range(3)]
    w = propagate_weights([], Cross(tuple(zs)))
    assert w.kind == CWGT_LOWER and w.value == 3
    assert replay_trace(w.trace)


def test_rp_example():
    # degree-one class mod 2 on RP^4 with its dual declared exact
    z = Atom("z", 1, True, RP4, "Z2")
    w = propagate_weights([fact(Dual(z), CWGT_EXACT, 3)], z)
    assert (w.kind, w.value) == (CWGT_EXACT, 3)
    assert replay_trace(w.trace, [fact(Dual(z), CWGT_EXACT, 3)])


def test_wedge_min():
    a = Atom("a", 1, True, Space("X", 3, False, True, True))
    b = Atom("b", 1, True, Space("Y", 3, False, True, True))
    w = propagate_weights([fact(a, CWGT_EXACT, 2), fact(b, CWGT_EXACT, 1)], WedgeSum(a, b))
    assert (w.kind, w.value) == (CWGT_EXACT, 1)


def test_zero_class():
    z = Atom("z", 1, True, SIGMA, zero=True)
    assert propagate_weights([], z).value == INF


def test_default_zero():
    z = Atom("z", 0, True, Space("X", None, False, True, True))
    w = propagate_weights([], z)
    assert w.value == 0 and replay_trace(w.trace)


def test_cap_adds():
    z, u = surface_atoms()
    w = propagate_weights([fact(z, CWGT_LOWER, 1)], Cap(u, z))
    assert w.value == 2


def test_positive_degree_cohomology():
    _, u = surface_atoms()
    assert strict_weight([], u).value == 1
    assert propagate_weights([], u).value == 1


def test_push_keeps_weight():
    z, _ = surface_atoms()
    zs = [z, Atom("w", 1, True, TORUS)]
    assert propagate_weights([], Push("q", Cross(tuple(zs)))).value == 2


def test_duality_only_on_closed_manifolds():
    lens = Space("L", 3, False, True, True)
    z = Atom("z", 1, True, lens)
    with pytest.raises(IllTyped):
        propagate_weights([fact(Dual(z), CWGT_EXACT, 5)], z)


def test_ill_typed():
    z, u = surface_atoms()
    with pytest.raises(IllTyped):
        propagate_weights([], Cap(z, u))
    with pytest.raises(IllTyped):
        propagate_weights([], Cross((z,)))


def test_tampered_trace_fails():
    z, u = surface_atoms()
    w = propagate_weights([fact(z, CWGT_LOWER, 1)], Cap(u, z))
    from dataclasses import replace
    last = w.trace[-1]
    bad = replace(last, conclusion=replace(last.conclusion, value=last.conclusion.value + 1))
    assert not replay_trace(w.trace[:-1] + (bad,), [fact(z, CWGT_LOWER, 1)])


@settings(max_examples=50)
@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 3))
def test_weights_monotone_in_facts(a, b, extra):
    z, u = surface_atoms()
    base = [fact(z, CWGT_LOWER, a), fact(u, CWGT_LOWER, b)]
    more = [fact(z, CWGT_LOWER, a + extra), fact(u, CWGT_LOWER, b + extra)]
    e = Cap(u, z)
    assert propagate_weights(more, e).value >= propagate_weights(base, e).value


@settings(max_examples=30)
@given(st.integers(1, 5))
def test_non_top_degree_classes_have_weight_one(k):
    # every factor in a k-fold cross sits below the top degree, so the engine and R-kprod agree
    zs = tuple(Atom(f"z{i}", 1, True, Space(f"S{i}", 2, True, True, True)) for i in range(k))
    e = zs[0] if k == 1 else Cross(zs)
    w = propagate_weights([], e)
    assert w.value >= (k if k > 1 else 0)
    assert replay_trace(w.trace)


def test_parse_roundtrip():
    z, u = surface_atoms()
    atoms = {"z": z, "u": u}
    for e in [Cap(u, z), Dual(z), Push("q", z)]:
        assert parse_expr(str(e), atoms) == e


# cat lower bounds

def test_cat_bound_from_weights():
    z = Atom("z", 0, True, Space("X", None, False, True, True))
    u = Atom("u", 2, False, Space("X", None, False, True, True))
    facts = [fact(u, CWGT_LOWER, 1)]
    step = cat_lower_bound(PairingDeclaration(u, z), facts)
    assert step.value == 2
    assert replay(step, facts=facts)
    assert not replay(step)


def test_cat_bound_surface():
    z, u = surface_atoms()
    L = BoundLedger("S", 2, True, True)
    step = cat_lower_bound(PairingDeclaration(u, z), [fact(z, CWGT_LOWER, 1)], L)
    assert step.value == 3 and L.best("cat", LOWER) == 3


def test_zero_pairing_rejected():
    z, u = surface_atoms()
    with pytest.raises(BoundError):
        cat_lower_bound(PairingDeclaration(u, z, nonzero=False), [])


def test_point_class():
    p = Atom("p", 0, True, SIGMA)
    L = BoundLedger("S", 2, True, True)
    L.declare("cat", 3)
    w = point_class_weight(p, L)
    assert (w.kind, w.value) == (CWGT_EXACT, 2)
    with pytest.raises(BoundError):
        point_class_weight(Atom("q", 1, True, SIGMA), L)


# cat^1 lower bounds

def test_cat1_surface():
    z, _ = surface_atoms()
    L = BoundLedger("S", 2, True, True)
    step = cat1_lower_bound(ObstructionPairing(z, 0, True, False), fact(z, CWGT_LOWER, 1), L)
    assert step.invariant == "cat1" and step.value == 2
    assert replay(step)


def test_algebraic_integer_rejected():
    z, _ = surface_atoms()
    with pytest.raises(RejectedBundle):
        cat1_lower_bound(ObstructionPairing(z, 0, True, True), fact(z, CWGT_LOWER, 1))


def test_xi_zero_bound_lands_on_cat():
    z, _ = surface_atoms()
    step = cat1_lower_bound(ObstructionPairing(z, 1, True, False), fact(z, CWGT_LOWER, 1), xi_zero=True)
    assert (step.rule, step.invariant, step.value) == ("obstruction-xi-zero", "cat", 3)


# ledgers

def test_ledger_saturation_surface():
    L = BoundLedger("S", 2, True, True)
    L.declare("cat", 3)
    L.declare("cat_xi", 1)
    L.saturate()
    assert L.interval("ccat1") == (1, 2)
    assert L.interval("cat1") == (1, 2)
    assert L.coherent()
    assert all(replay(s, {"S": L}) for s in L.history)


def test_xi_zero_collapses():
    L = BoundLedger("S", 2, True, False)
    L.declare("cat", 3)
    L.saturate()
    for inv in ("cat_xi", "cat1", "ccat1"):
        assert L.value(inv) == 3


def test_violation_detected():
    L = BoundLedger("X", None, True, True)
    L.declare("cat1", 4, side=LOWER)
    L.declare("ccat1", 2, side=UPPER)
    assert not L.coherent()


def test_product_rule():
    X = BoundLedger("X", 2, True, True)
    Y = BoundLedger("Y", 2, True, True)
    for L in (X, Y):
        L.declare("ccat1", 2)
    P = ccat1_upper_bounds(X, Y)
    assert P.best("ccat1", UPPER) == 3
    assert all(replay(s, {"X": X, "Y": Y}) for s in P.history)


def test_product_needs_positivity():
    X = BoundLedger("X", 2, True, True)
    Y = BoundLedger("Y", 2, True, True)
    for L in (X, Y):
        L.declare("ccat1", 0)
    with pytest.raises(ProductHypothesis):
        ccat1_upper_bounds(X, Y)


# fact bases

def test_surface_fact_base():
    res = run_factbase(parse_factbase(FACT_TEXTS["surface"]))
    assert [w.value for w in res.weights] == [1, 1, 2]
    assert res.ledger.best("cat", LOWER) == 3
    assert res.ledger.value("cat1") == 2
    assert res.ledger.coherent()


def test_product_fact_base():
    res = run_factbase(parse_factbase(FACT_TEXTS["product"]))
    assert [w.value for w in res.weights] == [2, 2]


@pytest.mark.parametrize("text, line", [
    ("space S dim=2 closed\natom z homology 1 T\n", 2),
    ("space S dim=2 closed\nfrobnicate\n", 2),
    ("space S dim=2 closed\natom z homology 1 S\nfact cwgt-lower z -1\n", 3),
    ("space S dim=2 closed\natom z homology 1 S\nquery cap(z, z)\n", 3),
])
def test_fact_base_errors(text, line):
    with pytest.raises(InputError) as err:
        parse_factbase(text)
    assert err.value.line == line and err.value.column is not None


# surface products

@pytest.mark.parametrize("pattern, cat1, cat, diff", [
    ("2:nz", 2, 1, 1),
    ("3:z", 3, 3, 0),
    ("2:nz,3:z,2:nz", 5, 3, 2),
    ("2:z,2:z", 5, 5, 0),
])
def test_surface_examples(pattern, cat1, cat, diff):
    res = surface_products_table(parse_pattern(pattern))
    assert (res.cat1, res.ccat1, res.cat, res.difference) == (cat1, cat1, cat, diff)
    assert res.replay()


def test_pattern_order_does_not_matter():
    a = surface_products_table(parse_pattern("3:z,2:nz"))
    b = surface_products_table(parse_pattern("2:nz,3:z"))
    assert (a.cat1, a.cat) == (b.cat1, b.cat)
    assert str(a.pattern) == "3:z,2:nz"


def test_pattern_errors():
    with pytest.raises(PatternError):
        parse_pattern("1:nz")
    with pytest.raises(PatternError):
        parse_pattern("2:maybe")
    with pytest.raises(PatternError):
        parse_pattern("")


def test_all_patterns_count():
    assert len(all_patterns(3, (2, 3))) == 4 + 16 + 64


def test_ledgers_coherent_along_pipeline():
    res = surface_products_table(parse_pattern("2:nz,2:nz,3:z"))
    for L in res.ledgers().values():
        assert L.coherent(), L.name
