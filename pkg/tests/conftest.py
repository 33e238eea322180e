import json
from pathlib import Path

import pytest

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def golden():
    def load(name):
        return json.loads((GOLDEN / name).read_text())
    return load


ACCEPTANCE: list[str] = []


@pytest.fixture
def record():
    """Store one summary line per acceptance criterion."""
    def _record(number, ok, detail):
        ACCEPTANCE.append(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
