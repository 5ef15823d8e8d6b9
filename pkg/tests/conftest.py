from collections import OrderedDict
from pathlib import Path

import pytest

TESTS = Path(__file__).parent
CORPUS = TESTS / "corpus"
GOLDEN = TESTS / "golden"

_acceptance: "OrderedDict[str, list[bool]]" = OrderedDict()


@pytest.fixture
def corpus() -> Path:
    return CORPUS


@pytest.fixture
def bell_source() -> str:
    return (CORPUS / "bell.qasm").read_text()


@pytest.fixture
def hadamard_source() -> str:
    return (CORPUS / "hadamard.qasm").read_text()


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("acceptance")
        if marker is not None:
            _acceptance.setdefault(marker.args[0], [])


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = next((m for m in report.__dict__.get("acceptance_marker", [])), None)
    if marker is None:
        return
    _acceptance.setdefault(marker, []).append(report.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        report.acceptance_marker = [marker.args[0]]


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, results in _acceptance.items():
        ok = bool(results) and all(results)
        status = "PASS" if ok else ("NOT RUN" if not results else "FAIL")
        terminalreporter.write_line(f"{status:7} {criterion}")
