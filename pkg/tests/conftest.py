import pytest

_RESULTS = {}


@pytest.fixture
def criterion():
    """Record one acceptance criterion: ``criterion(number, title, ok, detail)``."""

    def record(number, title, ok, detail=""):
        _RESULTS[number] = (title, bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_RESULTS):
        title, ok, detail = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  [{detail}]")
