import numpy as np
import pytest

from cspa.core import default_scenario, clutter_scenario, zero_noise


@pytest.fixture
def free_space():
    """Calibrated two-antenna scenario, all noise off."""
    return default_scenario(noise=zero_noise())


@pytest.fixture
def free_space_noisy():
    """Calibrated two-antenna scenario with default positioning jitter."""
    return default_scenario()


@pytest.fixture
def clutter():
    """Three weak static scatterers, default noise."""
    return clutter_scenario()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
