"""6-DOF rigid-body equation of motion and its fixed-step integrator.

The model solved here is the standard marine-craft form

    M nu_dot + C(nu) nu + D(nu) nu = tau

with M = rigid body + diagonal added mass.  Note one convention choice that
matters to callers: the hydrostatic restoring term is NOT a separate matrix
term here -- buoyancy and gravity arrive inside `tau` (see forces.py), because
the four-quadrant wave-aware buoyancy cannot be written as a static function
of pose alone.  Damping D(nu) is applied inside the step, so `tau` must
contain external forces only.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigurationError, GimbalLockError, IntegrationBlowupError
from .vessel import VesselState, wrap_angle

GIMBAL_MARGIN = 0.01  # rad; pitch closer than this to +/-90 deg is an error


def rotation_matrix(attitude):
    """Body->world rotation for ZYX Euler angles (roll, pitch, yaw)."""
    cr, sr = math.cos(attitude[0]), math.sin(attitude[0])
    cp, sp = math.cos(attitude[1]), math.sin(attitude[1])
    cy, sy = math.cos(attitude[2]), math.sin(attitude[2])
    return np.array(
        [
            [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
            [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
            [-sp, cp * sr, cp * cr],
        ]
    )


def euler_rate_matrix(attitude):
    """Maps body rates (p, q, r) to Euler-angle rates."""
    cr, sr = math.cos(attitude[0]), math.sin(attitude[0])
    cp = math.cos(attitude[1])
    if abs(cp) < math.sin(GIMBAL_MARGIN):
        raise GimbalLockError(f"pitch {attitude[1]:.4f} rad too close to +/-pi/2")
    tp = math.tan(attitude[1])
    return np.array(
        [
            [1.0, sr * tp, cr * tp],
            [0.0, cr, -sr],
            [0.0, sr / cp, cr / cp],
        ]
    )


def kinematic_transform(attitude):
    """(R, T): body->world rotation and Euler-rate transform for one attitude."""
    return rotation_matrix(attitude), euler_rate_matrix(attitude)


def build_mass_matrix(params):
    """6x6 rigid-body + added mass matrix (CG at body origin, diagonal M_A)."""
    m = np.zeros((6, 6))
    m[:3, :3] = params.mass * np.eye(3)
    m[3:, 3:] = params.inertia
    m += np.diag(params.added_mass)
    try:
        np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        raise ConfigurationError("mass matrix is not positive definite")
    return m


def _skew(v):
    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])


def coriolis_force(mass_matrix, nu):
    """C(nu) @ nu with the skew-symmetric block parameterization of C.

    Because C is skew-symmetric by construction, nu . C(nu) nu == 0 exactly
    (up to float rounding): the Coriolis term never changes kinetic energy.
    """
    v, w = nu[:3], nu[3:]
    a = mass_matrix[:3, :3] @ v + mass_matrix[:3, 3:] @ w
    b = mass_matrix[3:, :3] @ v + mass_matrix[3:, 3:] @ w
    sa = _skew(a)
    return np.concatenate([sa @ w, sa @ v + _skew(b) @ w])


def damping_force(nu, params):
    """-(D_lin + D_quad * |nu_i|) * nu_i per axis; always dissipative."""
    return -(params.linear_damping + params.quadratic_damping * np.abs(nu)) * nu


class DynamicsModel:
    """Caches the mass matrix and its inverse for repeated stepping."""

    def __init__(self, params):
        self.params = params
        self.mass_matrix = build_mass_matrix(params)
        self.inv_mass = np.linalg.inv(self.mass_matrix)

    def acceleration(self, nu, tau):
        rhs = tau - coriolis_force(self.mass_matrix, nu) + damping_force(nu, self.params)
        return self.inv_mass @ rhs

    def step(self, state, tau, dt):
        """One semi-implicit Euler step: velocity first, then pose with the
        updated velocity."""
        nu = state.nu + dt * self.acceleration(state.nu, tau)
        rot = rotation_matrix(state.attitude)
        t_euler = euler_rate_matrix(state.attitude)
        position = state.position + dt * (rot @ nu[:3])
        attitude = wrap_angle(state.attitude + dt * (t_euler @ nu[3:]))
        if not (np.all(np.isfinite(nu)) and np.all(np.isfinite(position)) and np.all(np.isfinite(attitude))):
            raise IntegrationBlowupError(
                f"non-finite state at t={state.sim_time + dt:.3f}",
                state=(position, attitude, nu),
            )
        return VesselState(position=position, attitude=attitude, nu=nu, sim_time=state.sim_time + dt)


def step_dynamics(state, tau, params, dt):
    """One integration step; see DynamicsModel.step for the scheme."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    return DynamicsModel(params).step(state, np.asarray(tau, dtype=float), dt)
