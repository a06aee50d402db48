import numpy as np
import pytest

from vortexshaping.jones import GaussianBeam, VortexRetarder
from vortexshaping.propagation import VortexBeamModel


@pytest.fixture
def beam():
    return GaussianBeam(w0=1e-3, wavelength=780.241e-9, power=1e-3)


@pytest.fixture
def model(beam):
    return VortexBeamModel(beam, VortexRetarder(1, 0.0))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# --- acceptance report ---------------------------------------------------------
# Each acceptance test records one line; they are printed together at the end
# of the session so that the verdicts are visible even when output is captured.

_ACCEPTANCE = {}


@pytest.fixture
def acceptance(request):
    def record(number: int, ok: bool, text: str):
        _ACCEPTANCE[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {text}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[k])
