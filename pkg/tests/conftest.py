"""Shared pytest hooks: collect acceptance-criterion verdict lines and
echo them in the terminal summary, where output capture cannot hide them."""

CRITERION_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERION_LINES):
            terminalreporter.write_line(line)
