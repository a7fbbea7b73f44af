from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from csfq.circuit import fitted_device

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# filled by tests/test_acceptance.py, echoed after the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def device():
    return fitted_device()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
