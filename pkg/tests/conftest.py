import pytest

RESULTS = []


def pytest_addoption(parser):
    parser.addoption("--slow", action="store_true", default=False, help="run full-scale and long runs")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip = pytest.mark.skip(reason="needs --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def slow(request):
    return request.config.getoption("--slow")


@pytest.fixture
def record_check():
    """Print an acceptance check and keep it for the end-of-session summary."""

    def _record(check):
        line = f"[{check.status}] criterion {check.criterion}: {check.name}: got {check.got} (expected {check.expected}, tol {check.tolerance})"
        if check.note:
            line += f"; {check.note}"
        print(line)
        RESULTS.append(line)
        return check

    return _record


def pytest_terminal_summary(terminalreporter):
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
