import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from arfima import ArfimaSpec, TimeSeries, simulate_arfima  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run Monte Carlo checks at full desk scale")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long Monte Carlo run, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def white_noise(rng):
    return TimeSeries(rng.standard_normal(300), {'seed': 12345})


@pytest.fixture
def long_memory_series():
    return simulate_arfima(ArfimaSpec.fractional_noise(0.3), 300, seed=42)
