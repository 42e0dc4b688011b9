"""Shared pytest hooks for the acceptance gate.

test_acceptance.py records one result per criterion through
``record_result``; the terminal summary then prints one PASS/FAIL line per
criterion so the gate can be read at a glance.
"""

from __future__ import annotations

ACCEPTANCE_RESULTS: list[tuple[int, str, bool, str]] = []


def record_result(criterion: int, label: str, passed: bool, detail: str = "") -> None:
    """Stash one criterion outcome for the end-of-run summary."""
    ACCEPTANCE_RESULTS.append((criterion, label, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, label, passed, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        line = f"criterion {criterion:2d}  {status}  {label}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line, green=passed, red=not passed)
