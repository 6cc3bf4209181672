import pytest

_acceptance_lines = []


@pytest.fixture
def acceptance_report():
    """Record a one-line verdict for an acceptance criterion.

    Lines are echoed in the terminal summary so they are visible even with
    output capture on.
    """

    def _report(criterion, ok, detail):
        line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'} - {detail}"
        _acceptance_lines.append((criterion, line))
        print(line)

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_acceptance_lines):
            terminalreporter.write_line(line)
