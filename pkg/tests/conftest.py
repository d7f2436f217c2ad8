import numpy as np
import pytest

from helpers import X4
from stablecomp import PointCloud, compute_distance_matrix

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    entry = _criteria.setdefault(number, {"title": title, "ok": True, "ran": False})
    if rep.when == "call" or rep.failed:
        entry["ran"] = True
        entry["ok"] &= not rep.failed


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "PASS" if entry["ok"] and entry["ran"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {entry['title']}")


@pytest.fixture
def x4():
    return PointCloud(X4)


@pytest.fixture
def x4_dm(x4):
    return compute_distance_matrix(x4)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)
