import pytest

_ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for an acceptance criterion."""
    def record(number, label, passed, detail=""):
        _ACCEPTANCE[number] = (label, bool(passed), detail)
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {label}"
        if detail:
            line += f" ({detail})"
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        label, passed, detail = _ACCEPTANCE[number]
        line = f"{'PASS' if passed else 'FAIL'}  {number}. {label}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
