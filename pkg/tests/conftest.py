import pytest

# Filled by tests/test_acceptance.py: (criterion number, title, passed, detail).
CRITERIA_LINES = []


def record_criterion(number, title, passed, detail=""):
    line = (number, title, bool(passed), detail)
    CRITERIA_LINES.append(line)
    print(f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(CRITERIA_LINES, key=lambda r: r[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2} {status}  {title}  {detail}")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(12345)
