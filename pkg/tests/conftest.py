import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion.

    The lines are printed where they run and echoed in a summary section at
    the end of the session, so they stay visible under output capture.
    """
    def report(num, name, ok, detail):
        line = (f"ACCEPTANCE {num:02d} {name}: "
                f"{'PASS' if ok else 'FAIL'} ({detail})")
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
