import pytest

from hetsec.channel import FIG2_GAINS, default_gains

# outcome of each acceptance criterion, filled by the report hook below
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when == "teardown":
        return
    n, title = marker.args
    passed = call.excinfo is None
    if passed and call.when == "setup":
        return
    prev = _CRITERIA.get(n, (title, True))
    _CRITERIA[n] = (title, prev[1] and passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture(scope="session")
def geometry_gains():
    return default_gains()


@pytest.fixture(scope="session")
def fig2_gains():
    return FIG2_GAINS
