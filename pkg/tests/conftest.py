import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record one ``(criterion, passed, detail)`` line for the terminal summary."""

    def log(name, passed, detail=""):
        ACCEPTANCE.append((name, bool(passed), detail))
        return passed

    return log


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
