from fractions import Fraction

import pytest

from charfol import construction as pc
from charfol.dynamics import analyse

EPS = Fraction(1, 10)


@pytest.fixture(scope="session", params=[2, 3], ids=lambda n: f"n={n}")
def obj(request):
    return pc.build(request.param)


@pytest.fixture(scope="session")
def obj2():
    return pc.build(2)


@pytest.fixture(scope="session")
def reduced():
    return pc.reduce_system(pc.build(2))


@pytest.fixture(scope="session")
def zeros(reduced):
    """The five analysed zeros of X' at eps = 1/10, keyed by label."""
    return {p.label: p for p in analyse(reduced, EPS)}


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, after the run."""
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, summary = results[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {summary}")
