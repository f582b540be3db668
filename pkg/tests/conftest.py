import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Route the dispatched kernels through one implementation for the test."""
    from ppclab import kernels

    impl = kernels.implementation(request.param)
    for name in ("window_bounds", "filtered_window_count", "grid_pair_count", "power_sums"):
        monkeypatch.setattr(kernels, name, getattr(impl, name))
    return request.param


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
