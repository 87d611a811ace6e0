import pytest

_CRITERIA: dict[int, tuple[bool, str]] = {}


class Recorder:
    def __call__(self, number: int, ok: bool, detail: str) -> None:
        _CRITERIA[number] = (bool(ok), detail)
        print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def criterion():
    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        ok, detail = _CRITERIA[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
