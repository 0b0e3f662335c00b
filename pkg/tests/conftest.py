import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_criteria = {}   # id -> description
_nodes = {}      # nodeid -> id
_outcomes = {}   # id -> list of bool


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is None:
            continue
        cid = mark.kwargs["id"]
        _criteria[cid] = mark.kwargs.get("description", "")
        _nodes[item.nodeid] = cid


def pytest_runtest_logreport(report):
    cid = _nodes.get(report.nodeid)
    if cid is None:
        return
    if report.when == "call" or report.failed:
        _outcomes.setdefault(cid, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_criteria):
        results = _outcomes.get(cid)
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {cid:>2}: {status:<7} {_criteria[cid]}")


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(20260)
