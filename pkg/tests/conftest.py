import pytest

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the terminal summary."""

    def record(label: str, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE.append((label, passed, detail))
        line = f"[{'PASS' if passed else 'FAIL'}] {label}" + (f" ({detail})" if detail else "")
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _ACCEPTANCE:
        suffix = f" ({detail})" if detail else ""
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {label}{suffix}")
