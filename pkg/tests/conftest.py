import pytest

from combofilter import example1, example2, run_monte_carlo

# One pass/fail line per acceptance criterion, printed after the run summary.
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    def record(criterion, label, ok):
        ACCEPTANCE_LINES.append(
            f"criterion {criterion} ({label}): {'PASS' if ok else 'FAIL'}"
        )
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def example1_result():
    return run_monte_carlo(example1(trials=50, seed=0))


@pytest.fixture(scope="session")
def example2_result():
    return run_monte_carlo(example2(trials=50, seed=0))
