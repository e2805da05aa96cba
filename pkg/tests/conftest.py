"""Shared pytest configuration.

Acceptance checks append ``(number, passed, detail)`` to ``ACCEPTANCE``;
the terminal summary prints one PASS/FAIL line per criterion so the lines
survive output capture.
"""

import pytest

ACCEPTANCE = []


@pytest.fixture
def acceptance_record():
    def record(number, passed, detail):
        ACCEPTANCE.append((number, bool(passed), detail))
        print(f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(
            f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}")
