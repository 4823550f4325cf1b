"""Vessel state, physical parameters and coefficient tables.

Conventions used everywhere in this package:

* world frame is NED (x north, y east, z down);
* body frame is x forward, y starboard, z down, origin at the CG;
* angles are radians internally, wrapped to (-pi, pi];
* SI units throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError

TWO_PI = 2.0 * math.pi


def wrap_angle(a):
    """Wrap an angle (scalar or array) into (-pi, pi]."""
    return math.pi - (math.pi - a) % TWO_PI


@dataclass(frozen=True)
class VesselState:
    """Pose in the world frame plus body-frame velocity.

    position: (north, east, down) in meters.
    attitude: (roll, pitch, yaw) in radians.
    nu: body velocity (u, v, w, p, q, r) in m/s and rad/s.
    """

    position: np.ndarray
    attitude: np.ndarray
    nu: np.ndarray
    sim_time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "attitude", wrap_angle(np.asarray(self.attitude, dtype=float)))
        object.__setattr__(self, "nu", np.asarray(self.nu, dtype=float))

    def is_finite(self):
        return (
            np.all(np.isfinite(self.position))
            and np.all(np.isfinite(self.attitude))
            and np.all(np.isfinite(self.nu))
            and math.isfinite(self.sim_time)
        )

    @classmethod
    def at_rest(cls, north=0.0, east=0.0, down=0.0, heading=0.0):
        return cls(
            position=np.array([north, east, down]),
            attitude=np.array([0.0, 0.0, heading]),
            nu=np.zeros(6),
        )


class CoefficientTable:
    """Sampled alpha -> (C_L, C_D) curve with linear interpolation.

    Samples cover alpha in [0, pi].  Lookups fold negative attack angles:
    C_L is odd in alpha (sign mirrored), C_D is even.
    """

    def __init__(self, samples):
        samples = [(float(a), float(cl), float(cd)) for a, cl, cd in samples]
        violations = []
        if not samples:
            violations.append("coefficient table: no samples")
        else:
            alphas = [s[0] for s in samples]
            if any(b <= a for a, b in zip(alphas, alphas[1:])):
                violations.append("coefficient table: alpha not strictly increasing")
            if abs(alphas[0]) > 1e-12:
                violations.append("coefficient table: first sample must be at alpha=0")
            if abs(alphas[-1] - math.pi) > 1e-9:
                violations.append("coefficient table: last sample must be at alpha=pi")
            if any(s[2] < 0 for s in samples):
                violations.append("coefficient table: C_D must be >= 0")
            if not all(math.isfinite(v) for s in samples for v in s):
                violations.append("coefficient table: non-finite entry")
        if violations:
            raise ConfigurationError(violations)
        self.alpha = np.array([s[0] for s in samples])
        self.cl = np.array([s[1] for s in samples])
        self.cd = np.array([s[2] for s in samples])

    def lookup(self, alpha):
        """Signed (C_L, C_D) at attack angle `alpha` (any real, radians)."""
        a = wrap_angle(alpha)
        mag = abs(a)
        cl = float(np.interp(mag, self.alpha, self.cl))
        cd = float(np.interp(mag, self.alpha, self.cd))
        if a < 0.0:
            cl = -cl
        return cl, cd

    def max_slope(self):
        """Largest |d/dalpha| over both curves; Lipschitz bound for lookups."""
        da = np.diff(self.alpha)
        return max(
            float(np.max(np.abs(np.diff(self.cl) / da))),
            float(np.max(np.abs(np.diff(self.cd) / da))),
        )


def interpolate_coefficients(table, alpha):
    """Functional alias for :meth:`CoefficientTable.lookup`."""
    return table.lookup(alpha)


@dataclass(frozen=True)
class FoilParams:
    """Geometry and coefficients of one lifting surface (sail, keel or rudder)."""

    area: float
    chord_direction: np.ndarray  # unit vector, body frame, zero deflection
    center_of_effort: np.ndarray  # meters, body frame, relative to CG
    coefficients: CoefficientTable
    deflection_limits: tuple  # (min, max) radians

    def __post_init__(self):
        object.__setattr__(self, "chord_direction", np.asarray(self.chord_direction, dtype=float))
        object.__setattr__(self, "center_of_effort", np.asarray(self.center_of_effort, dtype=float))


@dataclass(frozen=True)
class HullQuadrant:
    """One of the four buoyancy patches of the hull."""

    center: np.ndarray  # body frame offset from CG, meters
    volume: float  # reference displaced volume at full submergence, m^3
    plan_area: float  # waterplane area of the patch, m^2

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))


@dataclass(frozen=True)
class PropellerParams:
    """Discrete thrust table (integer level -> newtons) and application point."""

    levels: dict  # int -> float (N)
    position: np.ndarray  # body frame, meters

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "levels", {int(k): float(v) for k, v in self.levels.items()})

    @property
    def max_level(self):
        return max(self.levels)

    def thrust(self, level):
        return self.levels[int(level)]


@dataclass(frozen=True)
class VesselParams:
    """Full physical description of the vessel.

    All values are plain engineering inputs; see ``default_eboat_params``
    for the shipped defaults and ``validate_params`` for the invariants.
    """

    mass: float
    inertia: np.ndarray  # 3x3, body frame, kg m^2
    added_mass: np.ndarray  # 6 diagonal entries
    linear_damping: np.ndarray  # 6 diagonal entries
    quadratic_damping: np.ndarray  # 6 diagonal entries
    hull_quadrants: tuple  # 4 x HullQuadrant
    draft_ref: float  # depth at which a quadrant reaches full volume, m
    wave_damping: float  # per-quadrant vertical damping, N per m/s
    sail: FoilParams
    keel: FoilParams
    rudder: FoilParams
    propeller: PropellerParams
    rudder_rate: float  # rad/s
    boom_rate: float  # rad/s
    propeller_rate: float  # levels/s
    gravity: float = 9.81

    def __post_init__(self):
        object.__setattr__(self, "inertia", np.asarray(self.inertia, dtype=float))
        object.__setattr__(self, "added_mass", np.asarray(self.added_mass, dtype=float))
        object.__setattr__(self, "linear_damping", np.asarray(self.linear_damping, dtype=float))
        object.__setattr__(self, "quadratic_damping", np.asarray(self.quadratic_damping, dtype=float))
        object.__setattr__(self, "hull_quadrants", tuple(self.hull_quadrants))


def param_violations(params):
    """All invariant violations of `params`, as human-readable strings."""
    v = []
    if not params.mass > 0:
        v.append("mass: must be > 0")
    inertia = params.inertia
    if inertia.shape != (3, 3):
        v.append("inertia: must be a 3x3 matrix")
    else:
        if not np.allclose(inertia, inertia.T, atol=1e-9):
            v.append("inertia: must be symmetric")
        try:
            np.linalg.cholesky(inertia)
        except np.linalg.LinAlgError:
            v.append("inertia: must be positive definite")
    for name in ("added_mass", "linear_damping", "quadratic_damping"):
        arr = getattr(params, name)
        if arr.shape != (6,):
            v.append(f"{name}: must have 6 entries")
        elif np.any(arr < 0):
            v.append(f"{name}: entries must be >= 0")
    if len(params.hull_quadrants) != 4:
        v.append("hull_quadrants: exactly 4 quadrants required")
    for i, q in enumerate(params.hull_quadrants):
        if not q.volume > 0:
            v.append(f"hull_quadrants[{i}].volume: must be > 0")
        if q.plan_area < 0:
            v.append(f"hull_quadrants[{i}].plan_area: must be >= 0")
        if not np.all(np.isfinite(q.center)):
            v.append(f"hull_quadrants[{i}].center: must be finite")
    if not params.draft_ref > 0:
        v.append("draft_ref: must be > 0")
    if params.wave_damping < 0:
        v.append("wave_damping: must be >= 0")
    for name in ("sail", "keel", "rudder"):
        foil = getattr(params, name)
        if not foil.area > 0:
            v.append(f"{name}.area: must be > 0")
        lo, hi = foil.deflection_limits
        if lo > hi:
            v.append(f"{name}.deflection_limits: min must be <= max")
        if not np.all(np.isfinite(foil.center_of_effort)):
            v.append(f"{name}.center_of_effort: must be finite")
        if abs(np.linalg.norm(foil.chord_direction) - 1.0) > 1e-6:
            v.append(f"{name}.chord_direction: must be unit length")
    prop = params.propeller
    levels = sorted(prop.levels)
    top = max(abs(levels[0]), abs(levels[-1])) if levels else 0
    if levels != list(range(-top, top + 1)):
        v.append("propeller.levels: must cover integer levels -L..+L")
    elif prop.levels[0] != 0.0:
        v.append("propeller.levels: thrust at level 0 must be 0")
    if levels == list(range(-top, top + 1)):
        thrusts = [prop.levels[l] for l in levels]
        if any(b < a for a, b in zip(thrusts, thrusts[1:])):
            v.append("propeller.levels: thrust must be monotone non-decreasing")
    for name, rate in (
        ("rudder_rate", params.rudder_rate),
        ("boom_rate", params.boom_rate),
        ("propeller_rate", params.propeller_rate),
    ):
        if not rate > 0:
            v.append(f"{name}: must be > 0")
    if not params.gravity > 0:
        v.append("gravity: must be > 0")
    return v


def validate_params(params):
    """Return `params` unchanged, or raise ConfigurationError listing every violation."""
    violations = param_violations(params)
    if violations:
        raise ConfigurationError(violations)
    return params


# Shipped default coefficient curves.  The real vessel's curves were never
# published; these reproduce the usual qualitative shape (sail peaking near
# 25-30 deg then stalling, keel/rudder symmetric with stall near 15 deg) and
# are meant to be replaced from config when measured data exists.
SAIL_COEFFICIENTS = [
    # (alpha_deg, C_L, C_D)
    (0.0, 0.00, 0.05),
    (10.0, 0.60, 0.08),
    (25.0, 1.20, 0.15),
    (35.0, 1.00, 0.30),
    (60.0, 0.80, 0.70),
    (90.0, 0.45, 1.10),
    (120.0, 0.20, 0.90),
    (150.0, 0.05, 0.55),
    (180.0, 0.00, 0.35),
]

HYDROFOIL_COEFFICIENTS = [
    (0.0, 0.00, 0.008),
    (8.0, 0.70, 0.03),
    (15.0, 1.00, 0.10),
    (25.0, 0.70, 0.25),
    (45.0, 0.50, 0.60),
    (90.0, 0.00, 1.20),
    (135.0, -0.50, 0.60),
    (165.0, -0.70, 0.10),
    (180.0, 0.00, 0.05),
]


def table_from_degrees(rows):
    return CoefficientTable([(math.radians(a), cl, cd) for a, cl, cd in rows])


def default_eboat_params():
    """Documented default parameter set for a ~2.5 m, 100 kg robotic sailboat.

    Every number here is an engineering choice (the physical robot's values
    are not public); all of them can be overridden from the config file.
    Changing these defaults is a breaking change for downstream users.
    """
    length, beam = 2.5, 1.2
    sail = FoilParams(
        area=3.0,
        chord_direction=np.array([-1.0, 0.0, 0.0]),
        center_of_effort=np.array([0.0, 0.0, -1.2]),
        coefficients=table_from_degrees(SAIL_COEFFICIENTS),
        deflection_limits=(0.0, math.radians(90.0)),
    )
    keel = FoilParams(
        area=0.3,
        chord_direction=np.array([-1.0, 0.0, 0.0]),
        center_of_effort=np.array([0.0, 0.0, 0.4]),
        coefficients=table_from_degrees(HYDROFOIL_COEFFICIENTS),
        deflection_limits=(0.0, 0.0),
    )
    rudder = FoilParams(
        area=0.12,
        chord_direction=np.array([-1.0, 0.0, 0.0]),
        center_of_effort=np.array([-1.2, 0.0, 0.3]),
        coefficients=table_from_degrees(HYDROFOIL_COEFFICIENTS),
        deflection_limits=(-math.radians(45.0), math.radians(45.0)),
    )
    quadrants = tuple(
        HullQuadrant(center=np.array([sx * length / 4, sy * beam / 4, 0.0]), volume=0.05, plan_area=0.3)
        for sx, sy in ((1, 1), (1, -1), (-1, 1), (-1, -1))
    )
    return VesselParams(
        mass=100.0,
        inertia=np.diag([20.0, 45.0, 50.0]),
        added_mass=np.array([10.0, 40.0, 60.0, 5.0, 10.0, 15.0]),
        linear_damping=np.array([5.0, 150.0, 200.0, 50.0, 60.0, 30.0]),
        quadratic_damping=np.array([1.5, 200.0, 50.0, 50.0, 40.0, 20.0]),
        hull_quadrants=quadrants,
        draft_ref=0.25,
        wave_damping=150.0,
        sail=sail,
        keel=keel,
        rudder=rudder,
        propeller=PropellerParams(
            levels={lvl: 16.0 * lvl for lvl in range(-5, 6)},
            position=np.array([-1.25, 0.0, 0.15]),
        ),
        rudder_rate=math.radians(30.0),
        boom_rate=math.radians(20.0),
        propeller_rate=2.0,
    )


def with_overrides(params, **kwargs):
    """Copy `params` with some fields replaced (convenience for tests/config)."""
    return replace(params, **kwargs)
