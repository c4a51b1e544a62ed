import pytest

_RESULTS = {}  # nodeid -> [number, title, outcome, notes]


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    entry = _RESULTS.setdefault(item.nodeid, [*marker.args, "PASS", []])
    if report.skipped:
        entry[2] = "SKIP"
    elif report.failed:
        entry[2] = "FAIL"


@pytest.fixture
def note(request):
    """Attach a detail line to this criterion's summary entry."""
    marker = request.node.get_closest_marker("acceptance")
    entry = _RESULTS.setdefault(request.node.nodeid, [*marker.args, "PASS", []])
    return entry[3].append


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome, notes in sorted(_RESULTS.values(), key=lambda e: e[0]):
        terminalreporter.write_line(f"{outcome} criterion {number}: {title}")
        for line in notes:
            terminalreporter.write_line(f"    {line}")
