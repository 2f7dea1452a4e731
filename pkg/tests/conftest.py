import pytest

_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record a one-line acceptance verdict; all lines are repeated in the terminal summary."""
    def record(criterion: int, passed: bool, detail: str) -> bool:
        line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'} - {detail}"
        print(line)
        _VERDICTS.append(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
