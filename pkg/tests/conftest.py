import numpy as np
import pytest

from ultrajc.hamiltonians import ModelParams
from ultrajc.hilbert import HilbertDims


@pytest.fixture
def dims5():
    return HilbertDims(5)


@pytest.fixture
def dims():
    return HilbertDims(20)


@pytest.fixture
def fig1_params():
    """High-frequency point: g = 0.5, resonance, xi = 2.76, nu = 5."""
    return ModelParams(omega_0=1.0, omega_c=1.0, g=0.5, xi=2.76, nu=5.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(rng, dims):
    from ultrajc.hilbert import QuantumState

    v = rng.normal(size=dims.dim) + 1j * rng.normal(size=dims.dim)
    return QuantumState(v / np.linalg.norm(v), dims)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if not test_acceptance.REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(test_acceptance.REPORT):
        passed, detail = test_acceptance.REPORT[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if passed else 'FAIL'}  {detail}")
