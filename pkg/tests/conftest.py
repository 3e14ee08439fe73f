import os

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from novicat.groupring import LaurentPoly, XiOrder

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def polys(rank: int = 1, max_terms: int = 4, exp_range: int = 3, coeff: int = 5, nonzero: bool = False):
    exps = st.tuples(*[st.integers(-exp_range, exp_range)] * rank) if rank else st.just(())
    coeffs = st.integers(-coeff, coeff).filter(bool)
    terms = st.dictionaries(exps, coeffs, min_size=1 if nonzero else 0, max_size=max_terms)
    return terms.map(lambda d: LaurentPoly(d, rank))


def xi_orders(rank: int):
    if rank == 1:
        return st.sampled_from([XiOrder([[1]]), XiOrder([[-1]]), XiOrder([[2]])])
    # a first row with a coordinate pinned to 1 followed by the identity refines to an injective order
    first = st.lists(st.integers(-3, 3), min_size=rank, max_size=rank)
    return first.map(lambda row: XiOrder([row] + [[int(i == j) for j in range(rank)] for i in range(rank)]))


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep
