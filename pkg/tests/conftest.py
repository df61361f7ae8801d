import pytest

CRITERIA = {
    1: "involution suite",
    2: "conservation suite",
    3: "independence suite",
    4: "identity suite",
    5: "reduction",
    6: "parameter limits",
    7: "geometry",
    8: "integrator health",
    9: "mutation controls",
}

_results: dict[int, tuple[bool, str]] = {}


class AcceptanceRecorder:
    def record(self, criterion: int, passed: bool, detail: str = "") -> None:
        _results[criterion] = (bool(passed), detail)


@pytest.fixture
def acceptance():
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, label in CRITERIA.items():
        if n in _results:
            ok, detail = _results[n]
            tr.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {n} ({label}): {detail}")
        else:
            tr.write_line(f"FAIL  criterion {n} ({label}): not evaluated")
