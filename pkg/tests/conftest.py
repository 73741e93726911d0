"""Shared pytest hooks.

The acceptance tests record one status line per criterion; echo them in a
summary section so the full run always ends with the eleven lines, even
though passing tests' stdout is captured.
"""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None) if module else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
