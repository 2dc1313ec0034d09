import numpy as np
import pytest

from beable_lab import linalg as la


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def paulis():
    return tuple(la.pauli(a) for a in "xyz")


def ket(*amps):
    v = np.asarray(amps, dtype=complex)
    return v / np.linalg.norm(v)


def proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import SUMMARY
    except ImportError:
        return
    if SUMMARY:
        terminalreporter.section("acceptance criteria")
        for line in SUMMARY:
            terminalreporter.write_line(line)
