"""Shared fixtures for the dflregret test-suite."""

import pytest

from dflregret.config import reset_config
from dflregret.data import (
    conflicting_pair_dataset,
    generate,
    square_demo_dataset,
    triangle_demo_dataset,
)
from dflregret.logging_setup import configure_logging
from dflregret.problems import grid_shortest_path


@pytest.fixture(autouse=True)
def fresh_config():
    """Every test starts from the default configuration with quiet logs."""
    reset_config()
    configure_logging("WARNING")
    yield
    reset_config()


@pytest.fixture
def triangle_data():
    return triangle_demo_dataset()


@pytest.fixture
def square_data():
    return square_demo_dataset()


@pytest.fixture
def conflicting_data():
    return conflicting_pair_dataset()


@pytest.fixture
def grid3():
    return grid_shortest_path(3, 3)


@pytest.fixture
def grid3_data(grid3):
    """20 samples on the 3x3 grid: 14 train, 6 test, K=3."""
    return generate(grid3, n_samples=20, n_features=3, deg=2, noise=0.5, seed=11)
