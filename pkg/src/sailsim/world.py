"""Environment models: stochastic true wind and a sinusoidal wave field."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class WaveComponent:
    amplitude: float  # m
    wavelength: float  # m
    direction: tuple  # unit 2-vector (north, east), travel direction
    phase: float = 0.0  # radians


class WaveField:
    """Sum of directional deep-water sinusoids.

    Elevation is reported positive-up relative to the calm z=0 plane.
    Dispersion: omega = sqrt(g * k), k = 2*pi / wavelength.
    """

    def __init__(self, components, gravity=9.81):
        comps = list(components)
        for c in comps:
            if c.amplitude < 0:
                raise ConfigurationError("wave amplitude must be >= 0")
            if not c.wavelength > 0:
                raise ConfigurationError("wave wavelength must be > 0")
        self.components = tuple(comps)
        self.gravity = gravity
        self._amp = np.array([c.amplitude for c in comps])
        k = np.array([2.0 * math.pi / c.wavelength for c in comps])
        d = np.array([c.direction for c in comps], dtype=float).reshape(len(comps), 2)
        norms = np.linalg.norm(d, axis=1)
        if len(comps) and np.any(norms == 0):
            raise ConfigurationError("wave direction must be non-zero")
        if len(comps):
            d /= norms[:, None]
        self._kx = k * d[:, 0] if len(comps) else np.zeros(0)
        self._ky = k * d[:, 1] if len(comps) else np.zeros(0)
        self._omega = np.sqrt(gravity * k)
        self._phase = np.array([c.phase for c in comps])

    def with_phases(self, phases):
        """Copy of this field with new per-component phases (episode seeding)."""
        comps = [
            WaveComponent(c.amplitude, c.wavelength, c.direction, float(p))
            for c, p in zip(self.components, phases)
        ]
        return WaveField(comps, self.gravity)

    @property
    def max_elevation(self):
        return float(np.sum(self._amp))

    def elevation(self, x, y, t):
        """Surface elevation (m, positive up) at world (north=x, east=y), time t."""
        if not len(self.components):
            return 0.0
        arg = self._kx * x + self._ky * y - self._omega * t + self._phase
        return float(np.dot(self._amp, np.cos(arg)))

    def elevation_and_rate(self, x, y, t):
        """Elevation and its time derivative (m, m/s, both positive up)."""
        if not len(self.components):
            return 0.0, 0.0
        arg = self._kx * x + self._ky * y - self._omega * t + self._phase
        eta = float(np.dot(self._amp, np.cos(arg)))
        rate = float(np.dot(self._amp * self._omega, np.sin(arg)))
        return eta, rate


def wave_elevation(field, x, y, t):
    """Functional alias for :meth:`WaveField.elevation`."""
    return field.elevation(x, y, t)


def default_wave_field(gravity=9.81):
    """Small three-component default sea state; phases get randomized per episode."""
    return WaveField(
        [
            WaveComponent(0.10, 8.0, (1.0, 0.0)),
            WaveComponent(0.06, 5.0, (0.866025403784, 0.5)),
            WaveComponent(0.03, 3.0, (0.5, 0.866025403784)),
        ],
        gravity=gravity,
    )


class WindProcess:
    """True wind = constant mean + mean-reverting (OU) horizontal gust.

    The gust state is advanced with the exact discretization of the OU
    process, so the stationary per-axis standard deviation is exactly
    `gust_sigma` regardless of dt.  All randomness comes from the generator
    passed to :meth:`sample`; the process holds no entropy of its own.
    """

    def __init__(self, mean_vector, gust_sigma=0.0, gust_time_constant=3.0):
        if gust_sigma < 0:
            raise ConfigurationError("gust_sigma must be >= 0")
        if not gust_time_constant > 0:
            raise ConfigurationError("gust_time_constant must be > 0")
        self.mean_vector = np.asarray(mean_vector, dtype=float)
        self.gust_sigma = float(gust_sigma)
        self.gust_time_constant = float(gust_time_constant)
        self.gust = np.zeros(2)

    def sample(self, dt, rng):
        """Advance the gust state by dt and return the true wind (world 3-vector)."""
        if self.gust_sigma > 0.0:
            decay = math.exp(-dt / self.gust_time_constant)
            diffusion = self.gust_sigma * math.sqrt(1.0 - decay * decay)
            self.gust = self.gust * decay + diffusion * rng.standard_normal(2)
        wind = self.mean_vector.copy()
        wind[0] += self.gust[0]
        wind[1] += self.gust[1]
        return wind


def sample_wind(process, dt, rng):
    """Functional alias for :meth:`WindProcess.sample`; returns (process, wind)."""
    return process, process.sample(dt, rng)
