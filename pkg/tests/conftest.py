import numpy as np
import pytest

from coupon_discovery import KnownSet, make_binomial_prior, symmetric_channel

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture
def binom4():
    return make_binomial_prior(4, 0.2)


@pytest.fixture
def sym4():
    return symmetric_channel(4, 0.1)


@pytest.fixture
def known12():
    return KnownSet.of(4, [1, 2])


@pytest.fixture
def rng():
    return np.random.default_rng(20171017)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
