import numpy as np
import pytest

from paradoxlab.graph import build_undirected
from paradoxlab.synth import paperlike_fixture

CRITERIA_LINES = []


def undirected(edges, n=None):
    nodes = range(n) if n is not None else None
    return build_undirected(edges, mode="symmetrize", nodes=nodes)


def star(leaves):
    return undirected([(0, i) for i in range(1, leaves + 1)])


@pytest.fixture
def path_graph():
    g = undirected([("a", "b"), ("b", "c")])
    return g.with_attributes({"a": 0.1, "b": 0.5, "c": 0.2})


@pytest.fixture(scope="session")
def paperlike():
    return paperlike_fixture()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion, then assert."""

    def check(number, description, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {description} {detail}".rstrip()
        CRITERIA_LINES.append(line)
        print(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA_LINES:
            terminalreporter.write_line(line)
