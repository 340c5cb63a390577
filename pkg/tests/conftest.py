import warnings

import pytest

from conic_mfbm import DriftConvention, JumpParams, ModelParams, build_law
from conic_mfbm.errors import RegimeWarning

P_STAR_MODEL = dict(s0=100.0, r=0.05, sigma=0.2, epsilon=0.1, hurst=0.8, maturity=1.0)
P_STAR_JUMPS = dict(lam=1.0, mu1=-0.05, sigma1_sq=0.02)


@pytest.fixture
def model():
    return ModelParams(**P_STAR_MODEL)


@pytest.fixture
def jumps():
    return JumpParams(**P_STAR_JUMPS)


@pytest.fixture
def law(model, jumps):
    return build_law(model, jumps, DriftConvention.COMPENSATED, 1e-12)


@pytest.fixture
def no_regime_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        yield


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
