from __future__ import annotations

import random

import pytest
from hypothesis import settings, strategies as st

import oracles
from loopforge import catalog
from loopforge.loopcore import FiniteLoop

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@st.composite
def small_loops(draw, min_order: int = 1, max_order: int = 6) -> FiniteLoop:
    n = draw(st.integers(min_order, max_order))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return FiniteLoop(oracles.random_loop_table(n, random.Random(seed)))


@st.composite
def corpus_loops(draw, max_order: int = 12) -> FiniteLoop:
    names = ["F5", "S3", "M12", "SL8", "SL10", "Z2^2", "Z2^3"] + [f"Z{n}" for n in range(1, 9)]
    L = catalog.get_loop(draw(st.sampled_from(names)))
    return L if L.order <= max_order else catalog.get_loop("Z2")


@pytest.fixture(scope="session")
def F5():
    return catalog.get_loop("F5")


@pytest.fixture(scope="session")
def K28():
    return catalog.get_loop("K28")


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_lines() -> list[str]:
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
