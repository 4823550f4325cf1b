import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sailsim.errors import ConfigurationError
from sailsim.world import (
    WaveComponent,
    WaveField,
    WindProcess,
    default_wave_field,
    sample_wind,
    wave_elevation,
)


class TestWaveField:
    def test_single_component_closed_form(self):
        field = WaveField([WaveComponent(0.5, 10.0, (1.0, 0.0), phase=0.3)])
        k = 2.0 * math.pi / 10.0
        omega = math.sqrt(9.81 * k)
        x, y, t = 3.0, -2.0, 1.7
        expected = 0.5 * math.cos(k * x - omega * t + 0.3)
        assert math.isclose(field.elevation(x, y, t), expected, abs_tol=1e-12)

    def test_elevation_rate_is_time_derivative(self):
        field = default_wave_field()
        x, y, t, h = 5.0, 2.0, 3.0, 1e-6
        eta, rate = field.elevation_and_rate(x, y, t)
        numeric = (field.elevation(x, y, t + h) - field.elevation(x, y, t - h)) / (2 * h)
        assert math.isclose(eta, field.elevation(x, y, t), abs_tol=1e-12)
        assert math.isclose(rate, numeric, abs_tol=1e-5)

    def test_deep_water_dispersion(self):
        field = WaveField([WaveComponent(0.1, 8.0, (0.0, 1.0))])
        k = 2.0 * math.pi / 8.0
        assert math.isclose(field._omega[0], math.sqrt(9.81 * k))

    def test_direction_normalized(self):
        a = WaveField([WaveComponent(0.1, 8.0, (2.0, 0.0))])
        b = WaveField([WaveComponent(0.1, 8.0, (1.0, 0.0))])
        assert math.isclose(a.elevation(3.0, 1.0, 0.5), b.elevation(3.0, 1.0, 0.5))

    @given(
        st.floats(-100, 100),
        st.floats(-100, 100),
        st.floats(0, 1000),
    )
    def test_elevation_bounded_by_amplitude_sum(self, x, y, t):
        field = default_wave_field()
        assert abs(field.elevation(x, y, t)) <= field.max_elevation + 1e-12

    def test_empty_field_is_flat(self):
        field = WaveField([])
        assert field.elevation(1.0, 2.0, 3.0) == 0.0
        assert field.elevation_and_rate(1.0, 2.0, 3.0) == (0.0, 0.0)
        assert field.max_elevation == 0.0

    def test_with_phases(self):
        field = default_wave_field()
        shifted = field.with_phases([0.1, 0.2, 0.3])
        assert [c.phase for c in shifted.components] == [0.1, 0.2, 0.3]
        assert shifted.elevation(0, 0, 0) != field.elevation(0, 0, 0)

    def test_functional_alias(self):
        field = default_wave_field()
        assert wave_elevation(field, 1.0, 2.0, 3.0) == field.elevation(1.0, 2.0, 3.0)

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            WaveField([WaveComponent(-0.1, 8.0, (1.0, 0.0))])
        with pytest.raises(ConfigurationError):
            WaveField([WaveComponent(0.1, 0.0, (1.0, 0.0))])
        with pytest.raises(ConfigurationError):
            WaveField([WaveComponent(0.1, 8.0, (0.0, 0.0))])


class TestWindProcess:
    def test_zero_sigma_is_constant(self, rng):
        wind = WindProcess([0.0, 5.0, 0.0], gust_sigma=0.0)
        for _ in range(10):
            assert np.allclose(wind.sample(0.01, rng), [0.0, 5.0, 0.0])

    def test_deterministic_given_rng(self):
        a = WindProcess([1.0, 4.0, 0.0], gust_sigma=0.5)
        b = WindProcess([1.0, 4.0, 0.0], gust_sigma=0.5)
        ra, rb = np.random.default_rng(9), np.random.default_rng(9)
        for _ in range(50):
            assert np.array_equal(a.sample(0.01, ra), b.sample(0.01, rb))

    def test_stationary_std_matches_sigma(self):
        # exact OU discretization: long-run per-axis std equals gust_sigma
        wind = WindProcess([0.0, 0.0, 0.0], gust_sigma=0.8, gust_time_constant=2.0)
        rng = np.random.default_rng(4)
        samples = np.array([wind.sample(0.5, rng)[:2] for _ in range(20000)])
        assert abs(samples.std() - 0.8) < 0.03

    def test_mean_reversion(self):
        wind = WindProcess([0.0, 0.0, 0.0], gust_sigma=1.0, gust_time_constant=1.0)
        wind.gust = np.array([10.0, -10.0])

        class ZeroRng:
            def standard_normal(self, n):
                return np.zeros(n)

        for _ in range(100):
            wind.sample(0.1, ZeroRng())
        assert np.all(np.abs(wind.gust) < 1e-3)

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            WindProcess([0, 0, 0], gust_sigma=-1.0)
        with pytest.raises(ConfigurationError):
            WindProcess([0, 0, 0], gust_time_constant=0.0)

    def test_functional_alias(self, rng):
        wind = WindProcess([0.0, 5.0, 0.0], gust_sigma=0.3)
        proc, sample = sample_wind(wind, 0.01, rng)
        assert proc is wind
        assert sample.shape == (3,)
