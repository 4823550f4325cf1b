"""Generalized forces on the vessel: sail, keel, rudder, buoyancy, propeller.

Every function here is pure and returns a body-frame 6-vector
(Fx, Fy, Fz, Mx, My, Mz) about the CG.  Lift/drag follow the classic
quadratic law  |L| = 0.5 rho V^2 A C_L(alpha)  with the drag component along
the local flow and lift perpendicular to it in the horizontal body plane.
"""

from __future__ import annotations

import math

import numpy as np

from .dynamics import rotation_matrix
from .vessel import wrap_angle

RHO_AIR = 1.225  # kg/m^3
RHO_WATER = 1025.0  # kg/m^3
EPS_FLOW = 1e-6  # m/s; below this, attack angle is undefined -> zero force

ZERO_FORCE = np.zeros(6)


def _cross3(a, b):
    # np.cross spends most of its time on axis bookkeeping; these are always
    # plain 3-vectors, so compute the product directly
    return np.array(
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    )


class ApparentWind:
    """Air velocity relative to the vessel, in the body frame.

    `angle` is the direction the wind comes FROM, measured from the bow,
    positive to starboard; `speed` is the horizontal magnitude.
    """

    __slots__ = ("vector", "speed", "angle")

    def __init__(self, vector):
        self.vector = np.asarray(vector, dtype=float)
        self.speed = math.hypot(self.vector[0], self.vector[1])
        if self.speed > EPS_FLOW:
            self.angle = math.atan2(-self.vector[1], -self.vector[0])
        else:
            self.angle = 0.0


def apparent_wind(true_wind_world, state):
    """Apparent wind = true wind rotated to the body frame minus boat velocity."""
    rot = rotation_matrix(state.attitude)
    vec = rot.T @ np.asarray(true_wind_world, dtype=float) - state.nu[:3]
    return ApparentWind(vec)


def attack_angle(flow, chord_direction):
    """Signed horizontal angle from the flow direction to the chord, (-pi, pi].

    Returns (alpha, no_flow).  `flow` is the fluid velocity relative to the
    foil; alpha = 0 means the chord streams with the flow (no incidence).
    When the horizontal flow is below EPS_FLOW the angle is undefined: we
    return (0, True) and callers must produce zero force.
    """
    fx, fy = float(flow[0]), float(flow[1])
    if math.hypot(fx, fy) <= EPS_FLOW:
        return 0.0, True
    alpha = wrap_angle(math.atan2(chord_direction[1], chord_direction[0]) - math.atan2(fy, fx))
    return alpha, False


def _rotate_z(vec, angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * vec[0] - s * vec[1], s * vec[0] + c * vec[1], vec[2]])


def foil_force(foil, flow, deflection, fluid_density):
    """Lift + drag of one foil, applied at its center of effort.

    `deflection` rotates the chord about body z.  Lift sign follows the
    signed attack angle (table lookup mirrors C_L for negative alpha).
    """
    chord = _rotate_z(foil.chord_direction, deflection)
    alpha, no_flow = attack_angle(flow, chord)
    if no_flow:
        return ZERO_FORCE.copy()
    cl, cd = foil.coefficients.lookup(alpha)
    fx, fy = float(flow[0]), float(flow[1])
    speed = math.hypot(fx, fy)
    q = 0.5 * fluid_density * speed * speed * foil.area
    ux, uy = fx / speed, fy / speed  # flow direction (drag axis)
    # lift axis: flow direction rotated -90 deg about body z; positive alpha
    # (chord rotated counterclockwise from the flow) pushes along +lift axis.
    force = np.array([q * (cd * ux + cl * uy), q * (cd * uy - cl * ux), 0.0])
    r = foil.center_of_effort
    return np.concatenate([force, _cross3(r, force)])


def sail_force(params, apparent, boom_angle, rho_air=RHO_AIR):
    """Aerodynamic force of the boom-constrained sail.

    The commanded boom angle is a one-sided sheet constraint: the sail
    weathervanes freely (zero force) while the wind holds it inside the
    commanded angle, and lies exactly at the commanded angle once the wind
    would push it past (sheet taut).
    """
    sail = params.sail
    if apparent.speed <= EPS_FLOW:
        return ZERO_FORCE.copy()
    limit = min(max(boom_angle, sail.deflection_limits[0]), sail.deflection_limits[1])
    chord0 = math.atan2(sail.chord_direction[1], sail.chord_direction[0])
    # sail angle at which the chord streams exactly with the apparent flow
    weathervane = wrap_angle(math.atan2(apparent.vector[1], apparent.vector[0]) - chord0)
    if abs(weathervane) < limit:
        return ZERO_FORCE.copy()  # sheet slack
    deflection = math.copysign(limit, weathervane)
    return foil_force(sail, apparent.vector, deflection, rho_air)


def buoyancy_forces(state, wave_field, t, params, rho_water=RHO_WATER):
    """Four-quadrant hydrostatic force plus per-quadrant vertical wave damping.

    Each hull quadrant contributes rho * g * V_submerged upward at its
    center, with the submerged volume ramping linearly from 0 to the
    reference volume over `draft_ref` of local depth below the (possibly
    wavy) surface.  A vertical damper on each quadrant, acting against the
    quadrant's velocity relative to the local surface, stops the four-point
    model from ringing.
    """
    rot = rotation_matrix(state.attitude)
    g = params.gravity
    v, w = state.nu[:3], state.nu[3:]
    total = np.zeros(6)
    for quad in params.hull_quadrants:
        r = quad.center
        world = state.position + rot @ r
        eta, eta_rate = wave_field.elevation_and_rate(world[0], world[1], t)
        # NED: z is down, elevation is up; depth below surface of the center
        depth = eta + world[2]
        frac = depth / params.draft_ref
        if frac <= 0.0:
            continue
        if frac > 1.0:
            frac = 1.0
        lift_up = rho_water * g * quad.volume * frac
        if params.wave_damping > 0.0:
            vel_world = rot @ (v + _cross3(w, r))
            vert_up = -vel_world[2]  # NED down -> up
            lift_up -= params.wave_damping * frac * (vert_up - eta_rate)
        f_world = np.array([0.0, 0.0, -lift_up])
        f_body = rot.T @ f_world
        total[:3] += f_body
        total[3:] += _cross3(r, f_body)
    return total


def hull_damping(nu, params):
    """Diagonal linear+quadratic hull damping as a generalized force."""
    nu = np.asarray(nu, dtype=float)
    return -(params.linear_damping + params.quadratic_damping * np.abs(nu)) * nu


def propeller_thrust(level, params):
    """Discrete thrust-table lookup; force along body +x at the propeller."""
    thrust = params.propeller.thrust(level)
    force = np.array([thrust, 0.0, 0.0])
    return np.concatenate([force, _cross3(params.propeller.position, force)])


def gravity_force(state, params):
    """Weight at the CG, rotated into the body frame (no torque about CG)."""
    rot = rotation_matrix(state.attitude)
    f_body = rot.T @ np.array([0.0, 0.0, params.mass * params.gravity])
    out = np.zeros(6)
    out[:3] = f_body
    return out


def equilibrium_depth(params, rho_water=RHO_WATER, tol=1e-10):
    """CG depth (NED z, positive down) at which flat-water buoyancy equals weight."""
    target = params.mass / rho_water  # required displaced volume
    total = sum(q.volume for q in params.hull_quadrants)
    if target > total:
        raise ValueError("vessel heavier than full hull displacement")

    def displaced(z):
        vol = 0.0
        for q in params.hull_quadrants:
            frac = (z + q.center[2]) / params.draft_ref
            vol += q.volume * min(max(frac, 0.0), 1.0)
        return vol

    lo = min(-q.center[2] for q in params.hull_quadrants)
    hi = max(params.draft_ref - q.center[2] for q in params.hull_quadrants)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if displaced(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)
