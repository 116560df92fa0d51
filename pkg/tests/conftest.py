"""Shared pytest plumbing.

Tests tagged ``@pytest.mark.criterion("...")`` each contribute one
``[PASS]``/``[FAIL]`` line to an "acceptance criteria" section of the
terminal summary, with any measurement recorded by the test via
``record_property("detail", ...)`` appended.
"""

import pytest

_criteria = []


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(text): acceptance criterion checked by this test"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    # a setup failure (broken fixture) must still surface as a failed criterion
    if report.when == "call" or (report.when == "setup" and report.failed):
        detail = next(
            (str(v) for k, v in report.user_properties if k == "detail"), ""
        )
        _criteria.append((marker.args[0], report.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for text, passed, detail in _criteria:
        line = f"[{'PASS' if passed else 'FAIL'}] {text}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
