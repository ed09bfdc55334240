import math

import hypothesis.strategies as st
import pytest
from hypothesis import settings

from lowlying.potential import Potential

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

THRESHOLD = math.pi ** 2 / 4


@st.composite
def potentials(draw, max_pieces=6, vmax=50.0, half_width=1.0):
    """Piecewise-constant potentials inside [-half_width, half_width]."""
    m = draw(st.integers(1, max_pieces))
    cuts = draw(st.lists(st.floats(-half_width, half_width), min_size=m + 1, max_size=m + 1, unique=True))
    bp = sorted(cuts)
    if any(b - a < 1e-6 for a, b in zip(bp, bp[1:])):
        bp = [-half_width + 2 * half_width * i / m for i in range(m + 1)]
    vals = draw(st.lists(st.floats(-vmax, vmax), min_size=m, max_size=m))
    return Potential(tuple(bp), tuple(vals))


@pytest.fixture
def zero():
    return Potential.zero()


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.LINES:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.LINES:
            terminalreporter.write_line(line)
