import numpy as np
import pytest

from raptorspec import degrees

# Collected by tests/test_acceptance.py; printed at the end of the run so
# the per-criterion verdict survives pytest's output capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def omega1():
    return degrees.load("omega1")


@pytest.fixture(scope="session")
def omega2():
    return degrees.load("omega2")


@pytest.fixture(scope="session")
def small_dist():
    # d_max = 10, usable at desk-scale h where the built-ins (d_max 40, 66)
    # are out of range
    return degrees.DegreeDistribution.from_dict(
        {1: 0.1, 2: 0.5, 3: 0.2, 4: 0.1, 10: 0.1}, name="test-small"
    )


@pytest.fixture(scope="session")
def tiny_dist():
    return degrees.DegreeDistribution.from_dict({1: 0.4, 2: 0.6}, name="test-tiny")


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)
