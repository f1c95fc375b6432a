import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_CRITERIA = {}


def pytest_collection_modifyitems(config, items):
    if os.environ.get("EMBEDSCAN_FULL_CENSUS") == "1":
        return
    skip = pytest.mark.skip(reason="full census is opt-in: set EMBEDSCAN_FULL_CENSUS=1")
    for item in items:
        if "full_census" in item.keywords:
            item.add_marker(skip)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    detail = dict(item.user_properties).get("detail", "")
    _CRITERIA[marker.args[0]] = ("PASS" if rep.passed else "FAIL", marker.args[1], detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        status, title, detail = _CRITERIA[num]
        line = f"criterion {num} [{status}] {title}"
        terminalreporter.write_line(line + (f": {detail}" if detail else ""))
