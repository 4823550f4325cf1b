import numpy as np
import pytest

from sailsim.episode import EnvConfig
from sailsim.sensing import SensorNoise
from sailsim.vessel import default_eboat_params
from sailsim.world import WaveField


@pytest.fixture
def params():
    return default_eboat_params()


def quiet_config(**overrides):
    """EnvConfig with every stochastic input switched off.

    No gusts, flat water, noiseless sensors, no initial jitter -- episodes
    built from this are exactly repeatable and easy to reason about.
    """
    base = dict(
        gust_sigma=0.0,
        wave_field=WaveField([]),
        randomize_wave_phases=False,
        noise=SensorNoise().scaled(False),
        jitter_position_sigma=0.0,
        jitter_heading_sigma=0.0,
    )
    base.update(overrides)
    return EnvConfig(**base)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
