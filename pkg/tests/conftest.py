import pytest

# (criterion number, passed, detail) in the order the acceptance tests ran
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


@pytest.fixture
def record_criterion():
    def record(n: int, passed: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append((n, passed, detail))
        print(f"criterion {n}: {'PASS' if passed else 'FAIL'} {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n, passed, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if passed else 'FAIL'}  {detail}")
