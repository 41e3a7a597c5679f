import sys

import numpy as np
import pytest

from apeuler import kernels
from apeuler.assembly import AssembledField
from apeuler.base_flow import BaseFlow
from apeuler.config import RunConfig, build


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request, monkeypatch):
    """Run a test once per importable kernel backend."""
    mod = kernels.available_backends()[request.param]
    monkeypatch.setattr(kernels, "radial_derivative", mod.radial_derivative)
    monkeypatch.setattr(kernels, "power_profile_table", mod.power_profile_table)
    return request.param


@pytest.fixture(scope="session")
def desk_config():
    return RunConfig()


@pytest.fixture(scope="session")
def desk_parts(desk_config):
    return build(desk_config)


@pytest.fixture(scope="session")
def desk(desk_config, desk_parts):
    layout, freqs = desk_parts
    c = desk_config
    return AssembledField(BaseFlow(c.d, c.q), c.S, layout, freqs, c.p)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)



def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 11):
        terminalreporter.write_line(mod.ACCEPTANCE.get(n, f"criterion {n:2d} [FAIL] not run or errored"))
