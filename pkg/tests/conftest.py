import pytest

_ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def criterion():
    """Record the verdict of one acceptance criterion for the run summary."""

    def record(number: int, title: str, passed: bool, detail: str = "") -> bool:
        _ACCEPTANCE[number] = (title, bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, passed, detail = _ACCEPTANCE[number]
        line = f"[{'PASS' if passed else 'FAIL'}] {number:2d}. {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
