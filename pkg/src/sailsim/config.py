"""JSON config loading for vessel, world, sensors, mission and simulation.

File convention: angles in degrees, everything else SI.  Internally all
angles become radians.  Every section and every field is optional; omitted
values fall back to the documented defaults, so `{}` is a valid config.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .episode import EnvConfig, Mission, RewardConfig
from .errors import ConfigurationError
from .sensing import SensorNoise
from .vessel import (
    CoefficientTable,
    FoilParams,
    HullQuadrant,
    PropellerParams,
    VesselParams,
    default_eboat_params,
)
from .world import WaveComponent, WaveField, default_wave_field


def _rad(deg):
    return math.radians(float(deg))


def _foil_from_dict(d, default):
    table = default.coefficients
    if "table" in d:
        table = CoefficientTable([(_rad(a), cl, cd) for a, cl, cd in d["table"]])
    limits = default.deflection_limits
    if "deflection_limits_deg" in d:
        lo, hi = d["deflection_limits_deg"]
        limits = (_rad(lo), _rad(hi))
    return FoilParams(
        area=float(d.get("area", default.area)),
        chord_direction=np.asarray(d.get("chord_direction", default.chord_direction), dtype=float),
        center_of_effort=np.asarray(d.get("center_of_effort", default.center_of_effort), dtype=float),
        coefficients=table,
        deflection_limits=limits,
    )


def vessel_from_dict(d):
    base = default_eboat_params()
    if not d:
        return base
    quadrants = base.hull_quadrants
    if "hull_quadrants" in d:
        quadrants = tuple(
            HullQuadrant(
                center=np.asarray(q["center"], dtype=float),
                volume=float(q["volume"]),
                plan_area=float(q.get("plan_area", 0.0)),
            )
            for q in d["hull_quadrants"]
        )
    propeller = base.propeller
    if "propeller" in d:
        p = d["propeller"]
        propeller = PropellerParams(
            levels={int(k): float(v) for k, v in p.get("levels", {str(k): v for k, v in base.propeller.levels.items()}).items()},
            position=np.asarray(p.get("position", base.propeller.position), dtype=float),
        )
    return VesselParams(
        mass=float(d.get("mass", base.mass)),
        inertia=np.asarray(d.get("inertia", base.inertia), dtype=float),
        added_mass=np.asarray(d.get("added_mass", base.added_mass), dtype=float),
        linear_damping=np.asarray(d.get("linear_damping", base.linear_damping), dtype=float),
        quadratic_damping=np.asarray(d.get("quadratic_damping", base.quadratic_damping), dtype=float),
        hull_quadrants=quadrants,
        draft_ref=float(d.get("draft_ref", base.draft_ref)),
        wave_damping=float(d.get("wave_damping", base.wave_damping)),
        sail=_foil_from_dict(d.get("sail", {}), base.sail),
        keel=_foil_from_dict(d.get("keel", {}), base.keel),
        rudder=_foil_from_dict(d.get("rudder", {}), base.rudder),
        propeller=propeller,
        rudder_rate=_rad(d["rudder_rate_deg_s"]) if "rudder_rate_deg_s" in d else base.rudder_rate,
        boom_rate=_rad(d["boom_rate_deg_s"]) if "boom_rate_deg_s" in d else base.boom_rate,
        propeller_rate=float(d.get("propeller_rate", base.propeller_rate)),
        gravity=float(d.get("gravity", base.gravity)),
    )


def mission_from_dict(d):
    base = Mission(
        waypoints={"A": (50.0, 50.0), "B": (-50.0, 50.0), "C": (-50.0, -50.0), "D": (50.0, -50.0)},
        sequence="BCDACA",
    )
    if not d:
        return base
    waypoints = {k: tuple(float(x) for x in v) for k, v in d.get("waypoints", base.waypoints).items()}
    return Mission(
        waypoints=waypoints,
        sequence=str(d.get("sequence", base.sequence)),
        radius=float(d.get("radius", base.radius)),
        time_limit=float(d.get("time_limit", base.time_limit)),
    )


def waves_from_dict(d, gravity):
    if not d:
        return default_wave_field(gravity), True
    if not d.get("enabled", True):
        return WaveField([], gravity), False
    if "components" in d:
        comps = [
            WaveComponent(
                amplitude=float(c["amplitude"]),
                wavelength=float(c["wavelength"]),
                direction=(math.cos(_rad(c.get("direction_deg", 0.0))), math.sin(_rad(c.get("direction_deg", 0.0)))),
                phase=_rad(c.get("phase_deg", 0.0)),
            )
            for c in d["components"]
        ]
        field = WaveField(comps, gravity)
    else:
        field = default_wave_field(gravity)
    return field, bool(d.get("randomize_phases", True))


def noise_from_dict(d):
    base = SensorNoise()
    if not d:
        return base
    return SensorNoise(
        sigma_position=float(d.get("sigma_position", base.sigma_position)),
        sigma_speed=float(d.get("sigma_speed", base.sigma_speed)),
        sigma_angle=_rad(d["sigma_angle_deg"]) if "sigma_angle_deg" in d else base.sigma_angle,
        sigma_wind=float(d.get("sigma_wind", base.sigma_wind)),
        period=float(d.get("period", base.period)),
    )


def env_config_from_dict(doc, waves=None, noise=None):
    """Build an EnvConfig from a parsed JSON document.

    `waves` / `noise` force-override the config (CLI --waves/--noise flags);
    None leaves the file's choice alone.
    """
    if not isinstance(doc, dict):
        raise ConfigurationError("config root must be a JSON object")
    params = vessel_from_dict(doc.get("vessel", {}))
    mission = mission_from_dict(doc.get("mission", {}))
    wave_field, randomize = waves_from_dict(doc.get("waves", {}), params.gravity)
    if waves is False:
        wave_field = WaveField([], params.gravity)
    sensor_noise = noise_from_dict(doc.get("sensors", {}))
    if noise is False:
        sensor_noise = sensor_noise.scaled(False)

    wind = doc.get("wind", {})
    sim = doc.get("simulation", {})
    reward = doc.get("reward", {})
    start = sim.get("start", {})
    jitter = sim.get("initial_jitter", {})
    return EnvConfig(
        params=params,
        mission=mission,
        wind_mean=tuple(wind.get("mean", (0.0, 5.0, 0.0))),
        gust_sigma=float(wind.get("gust_sigma", 0.6)),
        gust_time_constant=float(wind.get("gust_time_constant", 3.0)),
        wave_field=wave_field,
        randomize_wave_phases=randomize,
        noise=sensor_noise,
        air_density=float(doc.get("air_density", 1.225)),
        water_density=float(doc.get("water_density", 1025.0)),
        dt=float(sim.get("dt", 0.01)),
        control_period=float(sim.get("control_period", 0.5)),
        start_position=tuple(start.get("position", (0.0, 0.0))),
        start_heading=_rad(start.get("heading_deg", 0.0)),
        jitter_position_sigma=float(jitter.get("position_sigma", 1.0)),
        jitter_heading_sigma=_rad(jitter.get("heading_sigma_deg", 5.0)),
        reward=RewardConfig(
            waypoint_bonus=float(reward.get("waypoint_bonus", 10.0)),
            capsize_penalty=float(reward.get("capsize_penalty", 50.0)),
        ),
    )


def load_config(path, waves=None, noise=None):
    """Read and parse a JSON config file into an EnvConfig."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config parse error: {exc}")
    return env_config_from_dict(doc, waves=waves, noise=noise)
