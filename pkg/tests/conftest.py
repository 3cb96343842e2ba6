import numpy as np
import pytest

from sddmesh.domain import GridSpec

ACCEPTANCE_LINES = []


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running statistical or timing test")
    config.addinivalue_line("markers", "invariant: module invariant / property test")
    # registered here rather than in pytest.ini so numba is first imported after
    # the package has chosen its threading layer
    config.addinivalue_line("filterwarnings", "ignore::numba.core.errors.NumbaPerformanceWarning")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def grid29():
    return GridSpec(29, 29)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
