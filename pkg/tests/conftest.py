"""Pytest configuration and shared fixtures."""

import numpy as np
import pytest

from syncbase.models.burst import BurstSpec
from syncbase.models.channel import ChannelConfig


def pytest_addoption(parser: pytest.Parser) -> None:
    """Add the --runslow option."""
    parser.addoption("--runslow", action="store_true", default=False, help="Run slow tests.")


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    """Skip tests marked slow unless --runslow is given."""
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng() -> np.random.Generator:
    """A seeded generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def noiseless() -> ChannelConfig:
    """An AWGN channel with noise disabled."""
    return ChannelConfig(snr_db=float("inf"))


@pytest.fixture
def preamble() -> tuple[int, ...]:
    """A fixed 64-symbol QPSK preamble."""
    return tuple(int(s) for s in np.random.default_rng(99).integers(0, 4, 64))


@pytest.fixture
def timing_spec(preamble: tuple[int, ...]) -> BurstSpec:
    """The burst spec of the timing task."""
    return BurstSpec.for_timing(preamble)
