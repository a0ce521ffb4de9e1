"""Collects one summary line per acceptance criterion and prints them at the end."""

import pytest

ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def acceptance(request):
    """Record the verdict line of the calling criterion test.

    Usage: ``acceptance(passed, "measured ...")``; returns ``passed``.
    """
    name = request.node.name

    def record(passed: bool, detail: str) -> bool:
        ACCEPTANCE_LINES[name] = f"{'PASS' if passed else 'FAIL'}  {name}: {detail}"
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[name])
