from __future__ import annotations

import random

import pytest
from hypothesis import settings, strategies as st

from hrushovski.corpus import random_class_structure
from hrushovski.structures import Structure

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def gadget1() -> Structure:
    """The three-point gadget over a single point a."""
    return Structure.build(3, ["a", "c1", "c2", "c3"], [("a", "c1", "c2"), ("a", "c1", "c3"), ("a", "c2", "c3")])


@pytest.fixture
def cycle3() -> Structure:
    return Structure.build(2, "abc", [("a", "b"), ("b", "c"), ("a", "c")])


@pytest.fixture
def path3() -> Structure:
    return Structure.build(2, "abc", [("a", "b"), ("b", "c")])


@st.composite
def class_structures(draw, arity=None, max_n=7):
    """Members of the class at alpha = 1, grown greedily from a drawn seed."""
    a = draw(st.sampled_from([2, 3])) if arity is None else arity
    n = draw(st.integers(0, max_n))
    seed = draw(st.integers(0, 2**32))
    return random_class_structure(random.Random(seed), a, n, 2 * n + 1)


@st.composite
def any_graphs(draw, max_n=7):
    n = draw(st.integers(0, max_n))
    verts = [f"v{i}" for i in range(n)]
    pairs = [(verts[i], verts[j]) for i in range(n) for j in range(i + 1, n)]
    edges = [e for e in pairs if draw(st.booleans())] if pairs else []
    return Structure.build(2, verts, edges)
