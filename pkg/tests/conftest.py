from __future__ import annotations

from pathlib import Path

import pytest

from semrep import data
from semrep.registry import default_registry
from semrep.xmlio import loads

FIXTURES = Path(__file__).parent / "fixtures"

_criteria: dict[str, tuple[str, str]] = {}


@pytest.fixture
def golden_text() -> str:
    return data.path("golden.xml").read_text(encoding="utf-8")


@pytest.fixture
def golden(golden_text):
    return loads(golden_text)


@pytest.fixture
def registry():
    return default_registry()


@pytest.fixture
def fixture_path():
    return lambda name: FIXTURES / name


@pytest.fixture
def criterion(record_property):
    """Tag an acceptance test with its criterion label for the summary."""
    return lambda label: record_property("criterion", label)


def pytest_runtest_logreport(report):
    label = dict(report.user_properties).get("criterion")
    if label is None:
        return
    if report.when == "call" or report.outcome != "passed":
        prev = _criteria.get(label)
        if prev is None or prev[0] == "PASS":
            _criteria[label] = ("PASS" if report.outcome == "passed" else "FAIL",
                                report.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_criteria, key=lambda s: int(s.split()[0])):
        status, nodeid = _criteria[label]
        terminalreporter.write_line(f"[{status}] criterion {label}  ({nodeid})")
