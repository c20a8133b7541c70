import pathlib

import pytest

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
FIXTURE_FILES = sorted(FIXTURES.glob("*.tlsf"))

_acceptance = {}


def read_fixture(name):
    return (FIXTURES / name).read_text(encoding="utf-8")


@pytest.fixture
def fixture_text():
    return read_fixture


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1].split("[", 1)[0]
    if name.startswith("test_ac"):
        # a parametrized criterion passes only if every case passes
        if _acceptance.get(name, "passed") == "passed":
            _acceptance[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for name, title in CRITERIA:
        outcome = _acceptance.get(name)
        if outcome is None:
            continue
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {title}")
