import pytest

from strengthci.models import ModelSpec

ZOO = {
    "wigner": ModelSpec("wigner", 400),
    "cov": ModelSpec("cov", 200, 500),
    "factor": ModelSpec("factor", 117, 139),
    "cca": ModelSpec("cca", 80, 520, 80),
}


@pytest.fixture(params=sorted(ZOO))
def any_spec(request):
    return ZOO[request.param]


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one verdict line per acceptance criterion and fail on a miss."""

    def record(label, ok, detail):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        assert ok, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
