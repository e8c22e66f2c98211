from __future__ import annotations

import sys

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(lines):
        terminalreporter.write_line(lines[key])


@pytest.fixture(scope="session")
def forward_characteristics():
    """Characterization of the (psi1, psi2) = (1, 100) pulse in the CM,0 mode."""
    from chiralpulse.chiral import SuperpositionSpec
    from chiralpulse.diagnostics import characterize
    from chiralpulse.scalar import PulseParams

    return characterize(PulseParams(psi1=1, psi2=100), SuperpositionSpec.single("CM,0"), 1.0)


@pytest.fixture(scope="session")
def reversed_characteristics():
    """Characterization of the (psi1, psi2) = (100, 1) pulse in the CM,0 mode."""
    from chiralpulse.chiral import SuperpositionSpec
    from chiralpulse.diagnostics import characterize
    from chiralpulse.scalar import PulseParams

    return characterize(PulseParams(psi1=100, psi2=1), SuperpositionSpec.single("CM,0"), 1.0)
