"""Shared fixtures and the acceptance summary printed after the test run."""

from __future__ import annotations

import pytest

from glimm_wedge.glimm import ConstantProfile, Mesh, ThetaSequence, run
from glimm_wedge.params import GasParams
from glimm_wedge.state import FlowState

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record_acceptance():
    """Store ``(passed, detail)`` for a numbered acceptance criterion."""

    def _record(number: int, passed: bool, detail: str) -> None:
        _ACCEPTANCE[number] = (bool(passed), detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")


def wedge_params(gamma: float = 1.1, tau: float = 0.0, b0: float = -0.3) -> GasParams:
    return GasParams(gamma=gamma, a_inf=1.0, tau=tau, b0=b0)


def wedge_run(k_max: int, gamma: float = 1.1, tau: float = 0.0, b0: float = -0.3, seed: int = 0):
    """Constant incoming stream ``(1, 0)`` on ``x in [0, 1]``."""
    p = wedge_params(gamma, tau, b0)
    profile = ConstantProfile(FlowState(1.0, 0.0))
    mesh = Mesh.build(p, 1.0, k_max, profile)
    return run(p, mesh, ThetaSequence.van_der_corput(k_max + 1, seed), profile)


@pytest.fixture(scope="session")
def wedge_400():
    """The 400-column wedge run (gamma 1.1, tau 0, b0 -0.3)."""
    return wedge_run(400)
