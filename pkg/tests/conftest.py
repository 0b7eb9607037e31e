import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fracorlicz.grid import build_grid
from fracorlicz.young import make_young

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


FAMILIES = {
    "power2": lambda: make_young("power", p=2),
    "power3": lambda: make_young("power", p=3),
    "power_log": lambda: make_young("power_log", p=2),
}


@pytest.fixture(params=sorted(FAMILIES))
def young(request):
    return FAMILIES[request.param]()


@pytest.fixture(scope="session")
def grid16():
    return build_grid((0, 1), 1 / 16, 0.25, 0.3)


@pytest.fixture(scope="session")
def grid32():
    return build_grid((0, 1), 1 / 32, 0.25, 0.3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
