"""Collects the one-line verdicts of the acceptance suite and prints them at the
end of the run, whether or not output capture is on."""

import pytest

_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    return _LINES.append


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_LINES, key=lambda s: int(s.split()[1].rstrip(":").lstrip("C"))):
        terminalreporter.write_line(line)
