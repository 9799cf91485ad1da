import pytest

_lines = []


@pytest.fixture
def verdict():
    """Print and remember a one-line PASS/FAIL summary for an acceptance check."""
    def record(label: str, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
        print(line)
        _lines.append(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _lines:
        terminalreporter.section("acceptance criteria")
        for line in _lines:
            terminalreporter.write_line(line)
