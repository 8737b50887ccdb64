import numpy as np
import pytest

from tbrw import engine, schedules


@pytest.fixture(scope="session", autouse=True)
def warm_kernel():
    # trigger numba compilation once so per-test timings stay honest
    engine.run("edge", schedules.bernoulli(0.5), 8, seed=0)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)
