import pytest

_RESULTS: list[tuple[str, str, str]] = []


@pytest.fixture
def record():
    """Store one acceptance outcome: ``record(criterion, passed, detail)``."""
    def _record(criterion: str, passed, detail: str = "") -> None:
        status = passed if isinstance(passed, str) else ("PASS" if passed else "FAIL")
        _RESULTS.append((criterion, status, detail))
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, status, detail in sorted(_RESULTS, key=lambda r: _order(r[0])):
        terminalreporter.write_line(f"[{status}] criterion {criterion}: {detail}")


def _order(criterion: str):
    head, _, tail = criterion.partition("-")
    return (int(head), tail)
