import warnings

import pytest

from sxpid.errors import DegenerateGeometryWarning

_criteria: dict[int, dict] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            number, title = mark.args
            entry = _criteria.setdefault(number, {"title": title, "outcomes": []})
            entry.setdefault("ids", []).append(item.nodeid)


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for number, entry in _criteria.items():
        if report.nodeid in entry["ids"]:
            entry["outcomes"].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        outcomes = entry["outcomes"]
        if not outcomes:
            status = "NOT RUN"
        elif all(o == "passed" for o in outcomes):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {number:>2} {status:<7} {entry['title']}")


@pytest.fixture
def no_geometry_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("error", DegenerateGeometryWarning)
        yield
