import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# Independent Dirac-representation matrices, written out from Pauli blocks.
_I2 = np.eye(2)
_Z2 = np.zeros((2, 2))
_PAULI = [np.array([[0, 1], [1, 0]], dtype=complex),
          np.array([[0, -1j], [1j, 0]], dtype=complex),
          np.array([[1, 0], [0, -1]], dtype=complex)]
G0 = np.block([[_I2, _Z2], [_Z2, -_I2]]).astype(complex)
GAMMA = np.array([G0] + [np.block([[_Z2, s], [-s, _Z2]]) for s in _PAULI])
G5 = np.block([[_Z2, _I2], [_I2, _Z2]]).astype(complex)
ETA = np.diag([1.0, -1.0, -1.0, -1.0])


def bar(psi):
    return np.conj(psi) @ G0


def current(psi):
    """j^mu = psibar gamma^mu psi, upper index."""
    return np.real(np.einsum("...a,mab,...b->...m", bar(psi), GAMMA, psi))


def scalar(psi):
    return np.real(np.einsum("...a,...a->...", bar(psi), psi))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def complex_arrays(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "LINES", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.LINES:
        terminalreporter.write_line(line)
