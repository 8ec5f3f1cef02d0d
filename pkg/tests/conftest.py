import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from guesswork.core import RATIONAL, make_distribution  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

NOISE = st.sampled_from([Fraction(k, 20) for k in range(11)] + [Fraction(1, 3), Fraction(2, 7)])


@st.composite
def distributions(draw, min_n=1, max_n=8):
    raw = draw(st.lists(st.integers(0, 40), min_size=min_n, max_size=max_n))
    if not any(raw):
        raw[0] = 1
    return make_distribution(raw, RATIONAL)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def four_symbols():
    return make_distribution(["2/5", "3/10", "1/5", "1/10"], RATIONAL)


@pytest.fixture
def sparse_four():
    return make_distribution(["1/2", "1/4", "3/20", "1/10"], RATIONAL)
