import json

import pytest

from kflag.tower import make_tower

# criterion id -> outcome, filled by the acceptance module
_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid or report.when != "call" and not report.failed:
        return
    name = report.nodeid.split("::")[-1]
    if not name.startswith("test_criterion_"):
        return
    prev = _ACCEPTANCE.get(name, "PASS")
    _ACCEPTANCE[name] = "FAIL" if report.failed or prev == "FAIL" else "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda s: int(s.split("_")[2])):
        terminalreporter.write_line(f"{_ACCEPTANCE[name]}  {name}")


@pytest.fixture
def write_tower(tmp_path):
    """Write a tower-spec dict to a temporary JSON file and return its path."""
    counter = iter(range(10**6))

    def _write(data):
        path = tmp_path / f"tower{next(counter)}.json"
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture
def sl2():
    return make_tower([("A", 2)])


@pytest.fixture
def sl2_sl2():
    return make_tower([("A", 2), ("A", 2)], {(2, 1): [[1, 0], [0, 0]]})
