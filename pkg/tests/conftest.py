import itertools

import numpy as np
import pytest

from rotbits.ldpc import encode, peg_code


@pytest.fixture(scope="session")
def code2304():
    return peg_code(2304, 1152, 3, seed=1)


@pytest.fixture(scope="session")
def code16():
    """(3,6)-regular PEG code with N=16, K=8: small enough to enumerate."""
    return peg_code(16, 8, 3, seed=0)


@pytest.fixture(scope="session")
def code16_dmin4():
    """(3,4)-regular PEG code, N=16, K=4, minimum distance 4."""
    return peg_code(16, 12, 3, seed=0)


def all_codewords(enc):
    return np.array([encode(enc, np.array(u)) for u in itertools.product([0, 1], repeat=enc.k)], dtype=np.uint8)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_ACCEPTANCE_LINES = []


def record_acceptance(line):
    print(line)
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
