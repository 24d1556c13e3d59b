import math

import numpy as np
import pytest
from hypothesis import strategies as st

from bell_lab.core import Axis, axis_from_planar_angle


def random_axis(rng: np.random.Generator) -> Axis:
    return Axis.from_vector(rng.standard_normal(3))


def deg(*angles):
    return [axis_from_planar_angle(math.radians(t)) for t in angles]


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


nonzero_vectors = st.tuples(
    *[st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)] * 3
).filter(lambda v: math.sqrt(sum(c * c for c in v)) > 1e-6)

planar_angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


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
