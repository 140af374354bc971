import pytest

_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record the outcome of one acceptance criterion; returns the pass flag."""

    def record(number, title, ok, detail):
        _ACCEPTANCE[number] = (bool(ok), title, detail)
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, title, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
