"""Shared fixtures and the acceptance checklist reporter.

Tests marked ``criterion(number, label)`` feed a summary section that
prints one PASS/FAIL line per checklist item after the run.  Several
tests may share a criterion number; the line is PASS only if all of
them passed.
"""

import pytest

import wavectl as w

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, label): acceptance checklist item")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    key = (marker.args[0], marker.args[1])
    if report.failed or report.skipped:
        _RESULTS[key] = False
    elif report.when == "call" and report.passed:
        _RESULTS.setdefault(key, True)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance checklist")
    for number, label in sorted(_RESULTS):
        status = "PASS" if _RESULTS[(number, label)] else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {number:02d} {label}: {status}")


@pytest.fixture(scope="session")
def bundle():
    return w.load_bundled_config()


@pytest.fixture(scope="session")
def design(bundle):
    return bundle.design


@pytest.fixture(scope="session")
def cell(bundle):
    return bundle.cell


@pytest.fixture(scope="session")
def table(bundle):
    return bundle.varactors


@pytest.fixture(scope="session")
def microstrip(bundle):
    return bundle.microstrip
