"""Shared pytest plumbing.

The acceptance suite records one line per criterion through
``record_criterion``; the lines are printed as they happen and replayed
in a dedicated section after the test table, where capture cannot hide
them.
"""

from typing import List

_criterion_lines: List[str] = []


def record_criterion(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"{name}: {status}" + (f" ({detail})" if detail else "")
    _criterion_lines.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in _criterion_lines:
            terminalreporter.write_line(line)
