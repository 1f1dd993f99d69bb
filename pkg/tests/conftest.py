from __future__ import annotations

import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_terminal_summary(terminalreporter):
    from tests import verdicts

    if verdicts.LINES:
        terminalreporter.section("acceptance criteria")
        for line in verdicts.LINES:
            terminalreporter.write_line(line)


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run the multi-minute nested theorem checks")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: nested theorem checks taking minutes per case (enable with --runslow)")


def pytest_collection_modifyitems(config, items):
    import pytest

    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="takes minutes per case; run with --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
