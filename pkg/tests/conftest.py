import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def pilot():
    """Thresholds and measurements recorded from pilot runs."""
    return json.loads((FIXTURES / "pilot_thresholds.json").read_text())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
