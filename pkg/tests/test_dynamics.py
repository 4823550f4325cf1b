import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sailsim.dynamics import (
    DynamicsModel,
    build_mass_matrix,
    coriolis_force,
    damping_force,
    euler_rate_matrix,
    kinematic_transform,
    rotation_matrix,
    step_dynamics,
)
from sailsim.errors import ConfigurationError, GimbalLockError, IntegrationBlowupError
from sailsim.vessel import VesselState, default_eboat_params, with_overrides

angles = st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False)


@given(angles, st.floats(-1.2, 1.2), angles)
def test_rotation_matrix_orthonormal(roll, pitch, yaw):
    r = rotation_matrix([roll, pitch, yaw])
    assert np.allclose(r @ r.T, np.eye(3), atol=1e-12)
    assert math.isclose(np.linalg.det(r), 1.0, abs_tol=1e-12)


def test_rotation_matrix_yaw_only():
    r = rotation_matrix([0.0, 0.0, math.pi / 2])
    # body x (forward) maps to world east when heading 90 deg
    assert np.allclose(r @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-12)


def test_rotation_matrix_roll_only():
    r = rotation_matrix([math.pi / 2, 0.0, 0.0])
    # rolled 90 deg starboard-down: body y (starboard) points world-down
    assert np.allclose(r @ [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], atol=1e-12)


def test_euler_rate_matrix_identity_when_level():
    assert np.allclose(euler_rate_matrix([0.0, 0.0, 0.3]), np.eye(3))


def test_euler_rate_matrix_gimbal_lock():
    with pytest.raises(GimbalLockError):
        euler_rate_matrix([0.0, math.pi / 2, 0.0])
    with pytest.raises(GimbalLockError):
        euler_rate_matrix([0.0, -math.pi / 2 + 0.001, 0.0])


def test_kinematic_transform_returns_both():
    r, t = kinematic_transform([0.1, 0.2, 0.3])
    assert np.allclose(r, rotation_matrix([0.1, 0.2, 0.3]))
    assert np.allclose(t, euler_rate_matrix([0.1, 0.2, 0.3]))


def test_build_mass_matrix_structure():
    params = default_eboat_params()
    m = build_mass_matrix(params)
    assert np.allclose(m[:3, :3], (params.mass + 0) * np.eye(3) + np.diag(params.added_mass[:3]))
    assert np.allclose(m, m.T)


def test_build_mass_matrix_rejects_indefinite():
    params = with_overrides(default_eboat_params(), inertia=np.diag([-20.0, 45.0, 50.0]))
    with pytest.raises(ConfigurationError):
        build_mass_matrix(params)


def test_coriolis_energy_neutral(rng):
    m = build_mass_matrix(default_eboat_params())
    for _ in range(1000):
        nu = rng.normal(0.0, 3.0, 6)
        c = coriolis_force(m, nu)
        assert abs(np.dot(nu, c)) <= 1e-9 * (1.0 + np.linalg.norm(nu) ** 3)


def test_coriolis_zero_at_rest():
    m = build_mass_matrix(default_eboat_params())
    assert np.all(coriolis_force(m, np.zeros(6)) == 0.0)


def test_damping_dissipative(rng):
    params = default_eboat_params()
    for _ in range(1000):
        nu = rng.normal(0.0, 3.0, 6)
        assert np.dot(nu, damping_force(nu, params)) <= 0.0


def test_step_advances_time():
    params = default_eboat_params()
    s = step_dynamics(VesselState.at_rest(), np.zeros(6), params, 0.01)
    assert math.isclose(s.sim_time, 0.01)
    assert np.all(s.nu == 0.0)


def test_step_constant_surge_force():
    # one step from rest: nu gains dt * F / m_total, pose moves with new nu
    params = default_eboat_params()
    tau = np.array([20.0, 0, 0, 0, 0, 0.0])
    s = step_dynamics(VesselState.at_rest(), tau, params, 0.01)
    m_total = params.mass + params.added_mass[0]
    assert math.isclose(s.nu[0], 0.01 * 20.0 / m_total)
    assert math.isclose(s.position[0], 0.01 * s.nu[0])


def test_step_semi_implicit_uses_updated_velocity():
    params = default_eboat_params()
    tau = np.array([100.0, 0, 0, 0, 0, 0.0])
    s = step_dynamics(VesselState.at_rest(), tau, params, 0.1)
    # explicit Euler would not move the pose on the first step
    assert s.position[0] > 0.0


def test_step_rejects_nonpositive_dt():
    params = default_eboat_params()
    with pytest.raises(ValueError):
        step_dynamics(VesselState.at_rest(), np.zeros(6), params, 0.0)


def test_blowup_raises():
    params = default_eboat_params()
    state = VesselState.at_rest()
    with np.errstate(invalid="ignore"):
        with pytest.raises(IntegrationBlowupError):
            step_dynamics(state, np.full(6, np.inf), params, 0.01)


def test_dynamics_model_caches_and_matches(rng):
    params = default_eboat_params()
    model = DynamicsModel(params)
    nu = rng.normal(0.0, 1.0, 6)
    tau = rng.normal(0.0, 50.0, 6)
    acc = model.acceleration(nu, tau)
    expected = np.linalg.solve(
        model.mass_matrix, tau - coriolis_force(model.mass_matrix, nu) + damping_force(nu, params)
    )
    assert np.allclose(acc, expected, atol=1e-10)


def test_integrator_first_order_convergence():
    """Endpoint error vs a dt/16 reference halves when dt halves."""
    params = default_eboat_params()
    model = DynamicsModel(params)
    horizon = 10.0

    def tau(t):
        return np.array(
            [
                30.0 * math.sin(0.4 * t),
                10.0 * math.cos(0.3 * t),
                5.0 * math.sin(0.7 * t),
                2.0 * math.cos(0.5 * t),
                1.5 * math.sin(0.6 * t),
                4.0 * math.cos(0.2 * t),
            ]
        )

    def endpoint(dt):
        s = VesselState.at_rest()
        for k in range(round(horizon / dt)):
            s = model.step(s, tau(k * dt), dt)
        return np.concatenate([s.position, s.attitude, s.nu])

    # reference is 16x finer than the finest refinement, so the first-order
    # truncation error of the reference itself stays negligible in the ratios
    base = 0.04
    ref = endpoint(base / 4 / 16)
    errors = [np.linalg.norm(endpoint(base / 2**i) - ref) for i in range(3)]
    for coarse, fine in zip(errors, errors[1:]):
        assert 1.7 <= coarse / fine <= 2.3
