"""Shared pytest plumbing: collects acceptance verdict lines and prints them
in the terminal summary, where capture cannot swallow them."""

VERDICTS = []


def record_verdict(line):
    VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
