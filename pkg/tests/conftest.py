import os
from importlib import resources

import pytest
from hypothesis import HealthCheck, settings

from hamon.benchmarks import acci, platoon
from hamon.log import parse_log

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.register_profile("quick", max_examples=50, deadline=None, suppress_health_check=list(HealthCheck))
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = resources.files("hamon") / "data"


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def platoon_model():
    return platoon()


@pytest.fixture(scope="session")
def acci_model():
    return acci()


@pytest.fixture(scope="session")
def platoon_log():
    return parse_log((DATA / "platoon_log.csv").read_text())


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
