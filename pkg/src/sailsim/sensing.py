"""Noisy sensor observations and rate-limited actuator motion."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .vessel import wrap_angle

OBSERVATION_FIELDS = (
    "distance_to_waypoint",
    "relative_bearing",
    "surge",
    "sway",
    "yaw_rate",
    "roll",
    "apparent_wind_speed",
    "apparent_wind_angle",
    "rudder_angle",
    "boom_angle",
    "propeller_level",
)


@dataclass(frozen=True)
class Observation:
    """What the navigation agent sees each control step.

    Angles are wrapped radians; the waypoint channels are relative to the
    current mission target (GPS abstracted to distance/bearing).
    """

    distance_to_waypoint: float
    relative_bearing: float
    surge: float
    sway: float
    yaw_rate: float
    roll: float
    apparent_wind_speed: float
    apparent_wind_angle: float
    rudder_angle: float
    boom_angle: float
    propeller_level: int

    def as_array(self):
        return [float(getattr(self, f)) for f in OBSERVATION_FIELDS]


@dataclass(frozen=True)
class SensorNoise:
    """Per-channel Gaussian sigmas plus the sensor refresh period."""

    sigma_position: float = 1.0  # m, on the distance channel
    sigma_speed: float = 0.1  # m/s
    sigma_angle: float = math.radians(0.5)
    sigma_wind: float = 0.2  # m/s
    period: float = 0.1  # s

    def scaled(self, enabled):
        if enabled:
            return self
        return SensorNoise(0.0, 0.0, 0.0, 0.0, self.period)


@dataclass(frozen=True)
class ActuatorState:
    """Current actuator positions and their commanded targets."""

    rudder_angle: float = 0.0
    boom_angle: float = 0.0
    propeller_level: int = 0
    rudder_target: float = 0.0
    boom_target: float = 0.0
    propeller_target: int = 0


def _clamp(x, lo, hi):
    return lo if x < lo else hi if x > hi else x


def _slew(current, target, max_delta):
    if target > current:
        return min(current + max_delta, target)
    return max(current - max_delta, target)


def apply_actuator_commands(actuators, rudder_cmd, boom_cmd, propeller_cmd, params, dt):
    """Clamp commands to limits and move each actuator at most one rate-step.

    Commands are physical targets (radians / integer level); non-finite
    commands must be rejected by the caller before reaching here.
    """
    rlo, rhi = params.rudder.deflection_limits
    blo, bhi = params.sail.deflection_limits
    top = params.propeller.max_level
    rudder_target = _clamp(rudder_cmd, rlo, rhi)
    boom_target = _clamp(boom_cmd, blo, bhi)
    propeller_target = int(_clamp(round(propeller_cmd), -top, top))

    rudder = _slew(actuators.rudder_angle, rudder_target, params.rudder_rate * dt)
    boom = _slew(actuators.boom_angle, boom_target, params.boom_rate * dt)
    # propeller moves in whole levels, at most rate*dt per call
    max_levels = int(math.floor(params.propeller_rate * dt + 1e-9))
    delta = propeller_target - actuators.propeller_level
    if delta > max_levels:
        delta = max_levels
    elif delta < -max_levels:
        delta = -max_levels
    return replace(
        actuators,
        rudder_angle=rudder,
        boom_angle=boom,
        propeller_level=actuators.propeller_level + delta,
        rudder_target=rudder_target,
        boom_target=boom_target,
        propeller_target=propeller_target,
    )


def true_observation(state, actuators, apparent, target_xy):
    """Noiseless observation of the current scene."""
    dn = target_xy[0] - state.position[0]
    de = target_xy[1] - state.position[1]
    distance = math.hypot(dn, de)
    bearing = wrap_angle(math.atan2(de, dn) - state.attitude[2])
    return Observation(
        distance_to_waypoint=distance,
        relative_bearing=bearing,
        surge=float(state.nu[0]),
        sway=float(state.nu[1]),
        yaw_rate=float(state.nu[5]),
        roll=float(state.attitude[0]),
        apparent_wind_speed=apparent.speed,
        apparent_wind_angle=apparent.angle,
        rudder_angle=actuators.rudder_angle,
        boom_angle=actuators.boom_angle,
        propeller_level=actuators.propeller_level,
    )


def add_noise(obs, noise, rng):
    """Per-channel Gaussian noise on a true observation."""
    if noise.sigma_position == noise.sigma_speed == noise.sigma_angle == noise.sigma_wind == 0.0:
        return obs
    n = rng.standard_normal(8)
    return Observation(
        distance_to_waypoint=max(0.0, obs.distance_to_waypoint + noise.sigma_position * n[0]),
        relative_bearing=wrap_angle(obs.relative_bearing + noise.sigma_angle * n[1]),
        surge=obs.surge + noise.sigma_speed * n[2],
        sway=obs.sway + noise.sigma_speed * n[3],
        yaw_rate=obs.yaw_rate + noise.sigma_angle * n[4],
        roll=wrap_angle(obs.roll + noise.sigma_angle * n[5]),
        apparent_wind_speed=max(0.0, obs.apparent_wind_speed + noise.sigma_wind * n[6]),
        apparent_wind_angle=wrap_angle(obs.apparent_wind_angle + noise.sigma_angle * n[7]),
        rudder_angle=obs.rudder_angle,
        boom_angle=obs.boom_angle,
        propeller_level=obs.propeller_level,
    )


class SensorSuite:
    """Zero-order-hold sensor frontend: fresh noisy values every `period`."""

    def __init__(self, noise, rng):
        self.noise = noise
        self.rng = rng
        self._held = None
        self._next_update = -math.inf

    def read(self, state, actuators, apparent, target_xy):
        if state.sim_time >= self._next_update - 1e-12:
            truth = true_observation(state, actuators, apparent, target_xy)
            self._held = add_noise(truth, self.noise, self.rng)
            self._next_update = state.sim_time + self.noise.period
        return self._held


def read_sensors(state, actuators, apparent, target_xy, noise, rng):
    """One-shot noisy read (no hold state); see SensorSuite for ZOH reads."""
    return add_noise(true_observation(state, actuators, apparent, target_xy), noise, rng)
