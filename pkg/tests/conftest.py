import numpy as np
import pytest

from distspec.rng import replication_stream

# fixed once for the whole suite
SEED = 12345

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture
def streams():
    def make(r, batch=None):
        return replication_stream(SEED, r, batch)

    return make


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
