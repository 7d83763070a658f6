from fractions import Fraction

import pytest
from hypothesis import strategies as st

from netauction.audit import library
from netauction.model import GlobalProfile, Instance, Report

MONEY = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3), Fraction(7, 2)]
NAMES = ["a", "b", "c", "d", "e"]


@st.composite
def instances(draw, max_agents=5):
    n = draw(st.integers(1, max_agents))
    names = NAMES[:n]
    seller = draw(st.sets(st.sampled_from(names), min_size=1))
    vals = {a: draw(st.sampled_from(MONEY)) for a in names}
    nbrs = {a: draw(st.sets(st.sampled_from([b for b in names if b != a] or ["a"]))) - {a}
            for a in names}
    return Instance(seller, vals, nbrs)


@st.composite
def profiles(draw, max_agents=5):
    inst = draw(instances(max_agents))
    reports = {}
    for a in inst.agents:
        kind = draw(st.sampled_from(["truth", "truth", "absent", "deviate"]))
        if kind == "absent":
            reports[a] = None
        elif kind == "deviate":
            nb = draw(st.sets(st.sampled_from(sorted(inst.neighbors[a]) or ["x"])))
            reports[a] = Report(draw(st.sampled_from(MONEY)), frozenset(nb) & inst.neighbors[a])
    return GlobalProfile(inst, reports)


def report_map(profile):
    return dict(zip(profile.instance.agents, profile.reports))


@pytest.fixture
def e1():
    return library.e1()


@pytest.fixture
def t2():
    return library.t2()


@pytest.fixture
def w():
    return library.w()


@pytest.fixture
def f3():
    return library.f3()


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
