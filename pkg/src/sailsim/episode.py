"""Episodic waypoint-mission environment: reset/step, reward, logging.

One episode is a single-threaded state machine; run as many episodes in
parallel as you like, they share nothing.  All randomness (wind gusts, wave
phases, sensor noise, initial jitter) flows from independent substreams of
the reset seed, which makes whole trajectories replayable bit for bit.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import forces
from .engine import CAPSIZE_ROLL, Engine
from .errors import ConfigurationError, EpisodeContractError, GimbalLockError, IntegrationBlowupError
from .sensing import (
    ActuatorState,
    SensorNoise,
    SensorSuite,
    apply_actuator_commands,
    true_observation,
)
from .vessel import VesselState, default_eboat_params, validate_params, wrap_angle
from .world import default_wave_field, WaveField


@dataclass(frozen=True)
class Mission:
    """Labeled waypoints plus the order in which to visit them."""

    waypoints: dict  # label -> (north, east) meters
    sequence: str  # e.g. "BCDACA"
    radius: float = 5.0  # acceptance radius, m
    time_limit: float = 3000.0  # s

    def validate(self):
        errors = []
        if not self.sequence:
            errors.append("mission.sequence: must be non-empty")
        for label in self.sequence:
            if label not in self.waypoints:
                errors.append(f"mission.sequence: unknown waypoint '{label}'")
        if not self.radius > 0:
            errors.append("mission.radius: must be > 0")
        if not self.time_limit > 0:
            errors.append("mission.time_limit: must be > 0")
        if errors:
            raise ConfigurationError(errors)
        return self

    def target(self, index):
        return self.waypoints[self.sequence[index]]


def default_mission():
    """Four labeled corners of a 100 m square, visited as BCDACA."""
    return Mission(
        waypoints={"A": (50.0, 50.0), "B": (-50.0, 50.0), "C": (-50.0, -50.0), "D": (50.0, -50.0)},
        sequence="BCDACA",
    )


@dataclass(frozen=True)
class Action:
    """Normalized agent command.

    rudder: [-1, 1] mapped onto the rudder deflection limits;
    boom: [0, 1] mapped onto [0, boom max];
    propeller: real, rounded to the nearest integer thrust level.
    Out-of-range values are clamped, never rejected; non-finite values are
    rejected (actuators hold).
    """

    rudder: float = 0.0
    boom: float = 0.0
    propeller: float = 0.0

    @classmethod
    def from_array(cls, arr):
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))

    def is_finite(self):
        return math.isfinite(self.rudder) and math.isfinite(self.boom) and math.isfinite(self.propeller)


@dataclass(frozen=True)
class RewardConfig:
    waypoint_bonus: float = 10.0
    capsize_penalty: float = 50.0


def compute_reward(prev_distance, new_distance, waypoint_reached, capsized, cfg=RewardConfig()):
    """Progress shaping plus sparse waypoint/capsize terms."""
    r = prev_distance - new_distance
    if waypoint_reached:
        r += cfg.waypoint_bonus
    if capsized:
        r -= cfg.capsize_penalty
    return r


def check_waypoint(position, mission, index):
    """(new_index, reached): advance at most one waypoint per call."""
    if index >= len(mission.sequence):
        return index, False
    tx, ty = mission.target(index)
    if math.hypot(tx - position[0], ty - position[1]) <= mission.radius:
        return index + 1, True
    return index, False


@dataclass
class StepResult:
    observation: object
    reward: float
    terminated: bool
    truncated: bool
    info: dict


LOG_COLUMNS = (
    "t",
    "north",
    "east",
    "down",
    "roll",
    "pitch",
    "yaw",
    "u",
    "v",
    "w",
    "p",
    "q",
    "r",
    "rudder",
    "boom",
    "propeller",
    "wind_north",
    "wind_east",
    "reward",
    "waypoint_index",
)

LOG_HEADER = "# sailsim-log v1"


class EpisodeLog:
    """Per-control-step trajectory records with a fixed CSV layout."""

    def __init__(self, rows=None):
        self.rows = list(rows) if rows else []

    def append(self, t, state, actuators, wind, reward, waypoint_index):
        self.rows.append(
            (
                float(t),
                *(float(x) for x in state.position),
                *(float(x) for x in state.attitude),
                *(float(x) for x in state.nu),
                float(actuators.rudder_angle),
                float(actuators.boom_angle),
                float(actuators.propeller_level),
                float(wind[0]),
                float(wind[1]),
                float(reward),
                float(waypoint_index),
            )
        )

    def column(self, name):
        i = LOG_COLUMNS.index(name)
        return [row[i] for row in self.rows]

    def to_csv(self):
        out = io.StringIO()
        out.write(LOG_HEADER + "\n")
        out.write(",".join(LOG_COLUMNS) + "\n")
        for row in self.rows:
            out.write(",".join(repr(v) for v in row) + "\n")
        return out.getvalue()

    @classmethod
    def from_csv(cls, text):
        lines = [ln for ln in text.splitlines() if ln]
        if len(lines) < 2 or not lines[0].startswith("#") or lines[1].split(",") != list(LOG_COLUMNS):
            raise ValueError("not a sailsim log: bad header")
        rows = []
        for n, ln in enumerate(lines[2:], start=3):
            parts = ln.split(",")
            if len(parts) != len(LOG_COLUMNS):
                raise ValueError(f"malformed log row {n}: expected {len(LOG_COLUMNS)} columns")
            try:
                rows.append(tuple(float(p) for p in parts))
            except ValueError:
                raise ValueError(f"malformed log row {n}: non-numeric value")
        return cls(rows)


@dataclass
class EnvConfig:
    """Everything an episode needs beyond the vessel parameters."""

    params: object = None
    mission: Mission = None
    wind_mean: tuple = (0.0, 5.0, 0.0)  # world frame m/s; default: wind blowing east
    gust_sigma: float = 0.6
    gust_time_constant: float = 3.0
    wave_field: WaveField = None
    randomize_wave_phases: bool = True
    noise: SensorNoise = None
    air_density: float = forces.RHO_AIR
    water_density: float = forces.RHO_WATER
    dt: float = 0.01
    control_period: float = 0.5
    start_position: tuple = (0.0, 0.0)
    start_heading: float = 0.0
    jitter_position_sigma: float = 1.0
    jitter_heading_sigma: float = math.radians(5.0)
    reward: RewardConfig = field(default_factory=RewardConfig)

    def __post_init__(self):
        if self.params is None:
            self.params = default_eboat_params()
        if self.mission is None:
            self.mission = default_mission()
        if self.wave_field is None:
            self.wave_field = default_wave_field(self.params.gravity)
        if self.noise is None:
            self.noise = SensorNoise()


class SailingEnv:
    """Reset/step environment over the vessel + world physics."""

    def __init__(self, config=None):
        self.config = config or EnvConfig()
        self.params = validate_params(self.config.params)
        self.mission = self.config.mission.validate()
        self.engine = Engine(self.params, self.config.air_density, self.config.water_density)
        self.substeps = max(1, int(round(self.config.control_period / self.config.dt)))
        self._running = False
        self._finished = False

    # -- lifecycle ---------------------------------------------------------

    def reset(self, seed, sensor_seed=None, mission=None):
        """Start a fresh episode; returns the first observation.

        `sensor_seed` optionally re-seeds only the sensor-noise substream,
        leaving the dynamics-relevant streams untouched (useful to verify
        the noise stream never leaks into the physics).
        """
        if mission is not None:
            self.mission = mission.validate()
        cfg = self.config
        streams = np.random.SeedSequence(int(seed)).spawn(4)
        self.rng_wind = np.random.default_rng(streams[0])
        rng_waves = np.random.default_rng(streams[1])
        rng_init = np.random.default_rng(streams[2])
        rng_sensor = np.random.default_rng(
            streams[3] if sensor_seed is None else np.random.SeedSequence(int(sensor_seed))
        )

        self.wind_mean = tuple(float(x) for x in cfg.wind_mean)
        self.gust = [0.0, 0.0]
        self._gust_decay = math.exp(-cfg.dt / cfg.gust_time_constant)
        self._gust_diffusion = cfg.gust_sigma * math.sqrt(1.0 - self._gust_decay**2)
        if cfg.randomize_wave_phases and len(cfg.wave_field.components):
            phases = rng_waves.uniform(0.0, 2.0 * math.pi, len(cfg.wave_field.components))
            self.waves = cfg.wave_field.with_phases(phases)
        else:
            self.waves = cfg.wave_field
        self.sensors = SensorSuite(cfg.noise, rng_sensor)

        north, east = cfg.start_position
        heading = cfg.start_heading
        if cfg.jitter_position_sigma > 0.0:
            jitter = rng_init.standard_normal(2) * cfg.jitter_position_sigma
            north, east = north + jitter[0], east + jitter[1]
        if cfg.jitter_heading_sigma > 0.0:
            heading = heading + rng_init.standard_normal() * cfg.jitter_heading_sigma
        depth = forces.equilibrium_depth(self.params, cfg.water_density)
        self.state = VesselState(
            position=np.array([north, east, depth]),
            attitude=np.array([0.0, 0.0, wrap_angle(heading)]),
            nu=np.zeros(6),
        )
        self.engine.set_waves(self.waves)
        self.engine.load_state(self.state)
        self.actuators = ActuatorState()
        self.waypoint_index = 0
        self.step_count = 0
        self.last_wind = np.array(self.wind_mean)
        self.log = EpisodeLog()
        self._running = True
        self._finished = False
        obs = self.sensors.read(self.state, self.actuators, self._apparent(), self.mission.target(0))
        return obs

    def _apparent(self):
        return forces.apparent_wind(self.last_wind, self.state)

    def step(self, action):
        """Advance one control period; physics runs at dt inside."""
        if not self._running:
            raise EpisodeContractError("step() before reset()")
        if self._finished:
            raise EpisodeContractError("step() on a finished episode")
        cfg = self.config
        if not isinstance(action, Action):
            action = Action.from_array(action)

        command_rejected = not action.is_finite()
        if not command_rejected:
            rlo, rhi = self.params.rudder.deflection_limits
            rudder_cmd = 0.5 * (rlo + rhi) + 0.5 * (rhi - rlo) * min(max(action.rudder, -1.0), 1.0)
            boom_cmd = self.params.sail.deflection_limits[1] * min(max(action.boom, 0.0), 1.0)
            self.actuators = apply_actuator_commands(
                self.actuators, rudder_cmd, boom_cmd, action.propeller, self.params, cfg.control_period
            )

        prev_distance = self._distance_to_target()
        capsized = False
        blowup = None
        if self._gust_diffusion > 0.0:
            normals = self.rng_wind.standard_normal(2 * self.substeps)
        else:
            normals = ()
        try:
            status = self.engine.advance(
                self.substeps,
                cfg.dt,
                self.actuators,
                self.wind_mean,
                self.gust,
                self._gust_decay,
                self._gust_diffusion,
                normals,
            )
            capsized = status == "capsize"
        except (GimbalLockError, IntegrationBlowupError) as exc:
            capsized = True
            blowup = exc
        self.state = self.engine.export_state()
        self.last_wind = np.array(self.engine.wind)

        self.waypoint_index, reached = check_waypoint(self.state.position, self.mission, self.waypoint_index)
        mission_done = self.waypoint_index >= len(self.mission.sequence)
        new_distance = prev_distance if mission_done else self._distance_to_target()
        if reached:
            # progress is measured against the waypoint that was current
            # when the step began
            tx, ty = self.mission.target(self.waypoint_index - 1)
            new_distance = math.hypot(tx - self.state.position[0], ty - self.state.position[1])
        reward = compute_reward(prev_distance, new_distance, reached, capsized, cfg.reward)

        terminated = capsized or mission_done
        truncated = (not terminated) and self.state.sim_time >= self.mission.time_limit
        self._finished = terminated or truncated
        self.step_count += 1

        target = self.mission.target(min(self.waypoint_index, len(self.mission.sequence) - 1))
        apparent = self._apparent()
        obs = self.sensors.read(self.state, self.actuators, apparent, target)
        self.log.append(self.state.sim_time, self.state, self.actuators, self.last_wind, reward, self.waypoint_index)
        info = {
            "position": [float(x) for x in self.state.position],
            "attitude": [float(x) for x in self.state.attitude],
            "nu": [float(x) for x in self.state.nu],
            "sim_time": self.state.sim_time,
            "waypoint_index": self.waypoint_index,
            "target": list(target),
            "wind_true": [float(wind_c) for wind_c in self.last_wind[:2]],
            "capsized": capsized,
            "command_rejected": command_rejected,
            "apparent_wind": [apparent.speed, apparent.angle],
            "forces": self._force_breakdown(),
        }
        if blowup is not None:
            info["fault"] = str(blowup)
        return StepResult(obs, reward, terminated, truncated, info)

    def _force_breakdown(self):
        """Per-force generalized-force diagnostics at the current state."""
        return self.engine.force_breakdown(self.actuators)

    def _distance_to_target(self):
        if self.waypoint_index >= len(self.mission.sequence):
            return 0.0
        tx, ty = self.mission.target(self.waypoint_index)
        return math.hypot(tx - self.state.position[0], ty - self.state.position[1])

    @property
    def finished(self):
        return self._finished

    def observation_space(self):
        from .sensing import OBSERVATION_FIELDS

        return {"type": "box", "names": list(OBSERVATION_FIELDS)}

    def action_space(self):
        return {
            "type": "box",
            "names": ["rudder", "boom", "propeller"],
            "low": [-1.0, 0.0, -float(self.params.propeller.max_level)],
            "high": [1.0, 1.0, float(self.params.propeller.max_level)],
        }


# -- scripted baseline -----------------------------------------------------


@dataclass
class BaselineController:
    """Rule-based stand-in for a trained policy.

    Proportional rudder on bearing error (with yaw-rate damping), boom eased
    with the apparent wind angle, propeller assisting whenever boat speed
    drops below a threshold, throttled back near the waypoint so the turn
    radius stays inside the acceptance circle.
    """

    bearing_gain: float = 1.5
    yaw_damping: float = 0.8
    assist_speed: float = 4.5  # m/s
    slow_radius: float = 12.0  # m
    heel_dump: float = math.radians(20.0)  # ease the sheet fully past this heel

    def __call__(self, obs):
        # positive rudder deflection yaws the bow to port, so steer with
        # the opposite sign of the bearing error
        rudder = -self.bearing_gain * obs.relative_bearing + self.yaw_damping * obs.yaw_rate
        awa = abs(obs.apparent_wind_angle)
        boom_deg = min(max((math.degrees(awa) - 20.0) * 0.5, 5.0), 85.0)
        boom = boom_deg / 90.0
        if abs(obs.roll) > self.heel_dump:
            boom = 1.0  # ease the sheet fully and let the sail luff
        speed = math.hypot(obs.surge, obs.sway)
        if obs.distance_to_waypoint < self.slow_radius:
            propeller = 3.0 if speed < 2.5 else 0.0
        elif speed < self.assist_speed:
            propeller = 5.0
        else:
            propeller = 0.0
        return Action(rudder=min(max(rudder, -1.0), 1.0), boom=boom, propeller=propeller)


def run_scripted_baseline(env, seed, controller=None, sensor_seed=None, max_steps=None):
    """Drive one full mission with the scripted controller; returns the log."""
    controller = controller or BaselineController()
    obs = env.reset(seed, sensor_seed=sensor_seed)
    limit = max_steps or int(env.mission.time_limit / env.config.control_period) + 1
    for _ in range(limit):
        result = env.step(controller(obs))
        obs = result.observation
        if result.terminated or result.truncated:
            break
    return env.log
