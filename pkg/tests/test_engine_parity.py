"""Pins the fused scalar engine to the modular reference physics.

engine.Engine flattens the numpy force/dynamics composition into plain-float
Python for speed.  These tests integrate both paths from random states and
require agreement to 1e-9, so any edit to one side that forgets the other
fails immediately.
"""

import math

import numpy as np

from sailsim import forces
from sailsim.dynamics import step_dynamics
from sailsim.engine import CAPSIZE_ROLL, Engine
from sailsim.sensing import ActuatorState
from sailsim.vessel import VesselState, default_eboat_params
from sailsim.world import WaveField, default_wave_field

PARAMS = default_eboat_params()
WAVES = default_wave_field().with_phases([0.3, 1.1, 2.2])


def reference_substep(state, actuators, wind, waves, dt):
    """One physics substep through the modular numpy functions."""
    p = PARAMS
    aw = forces.apparent_wind(wind, state)
    tau = forces.sail_force(p, aw, actuators.boom_angle)
    keel_flow = -(state.nu[:3] + np.cross(state.nu[3:], p.keel.center_of_effort))
    tau = tau + forces.foil_force(p.keel, keel_flow, 0.0, forces.RHO_WATER)
    rudder_flow = -(state.nu[:3] + np.cross(state.nu[3:], p.rudder.center_of_effort))
    tau = tau + forces.foil_force(p.rudder, rudder_flow, actuators.rudder_angle, forces.RHO_WATER)
    tau = tau + forces.buoyancy_forces(state, waves, state.sim_time, p)
    tau = tau + forces.propeller_thrust(actuators.propeller_level, p)
    tau = tau + forces.gravity_force(state, p)
    return step_dynamics(state, tau, p, dt)


def random_scene(rng):
    pos = rng.normal(0.0, 5.0, 3)
    pos[2] = rng.normal(0.05, 0.05)
    state = VesselState(
        position=pos,
        attitude=rng.normal(0.0, 0.2, 3),
        nu=rng.normal(0.0, 0.5, 6),
        sim_time=float(rng.uniform(0.0, 10.0)),
    )
    actuators = ActuatorState(
        rudder_angle=float(rng.uniform(-0.6, 0.6)),
        boom_angle=float(rng.uniform(0.0, 1.5)),
        propeller_level=int(rng.integers(-5, 6)),
    )
    wind = (float(rng.normal(0.0, 3.0)), float(rng.normal(5.0, 2.0)), 0.0)
    return state, actuators, wind


def max_state_deviation(a, b):
    return max(
        float(np.max(np.abs(np.asarray(a.position) - b.position))),
        float(np.max(np.abs(np.asarray(a.attitude) - b.attitude))),
        float(np.max(np.abs(np.asarray(a.nu) - b.nu))),
    )


def test_engine_matches_reference_over_random_rollouts():
    rng = np.random.default_rng(7)
    dt = 0.01
    for _ in range(15):
        state, actuators, wind = random_scene(rng)
        engine = Engine(PARAMS, forces.RHO_AIR, forces.RHO_WATER)
        engine.set_waves(WAVES)
        engine.load_state(state)
        engine.advance(50, dt, actuators, wind, [0.0, 0.0], 0.0, 0.0, ())

        ref = state
        for _ in range(50):
            ref = reference_substep(ref, actuators, np.asarray(wind), WAVES, dt)
        assert max_state_deviation(engine.export_state(), ref) < 1e-9


def test_engine_matches_reference_flat_water():
    rng = np.random.default_rng(8)
    state, actuators, wind = random_scene(rng)
    flat = WaveField([])
    engine = Engine(PARAMS, forces.RHO_AIR, forces.RHO_WATER)
    engine.set_waves(flat)
    engine.load_state(state)
    engine.advance(50, 0.01, actuators, wind, [0.0, 0.0], 0.0, 0.0, ())
    ref = state
    for _ in range(50):
        ref = reference_substep(ref, actuators, np.asarray(wind), flat, 0.01)
    assert max_state_deviation(engine.export_state(), ref) < 1e-9


def test_engine_gust_consumes_pregenerated_normals():
    # gust path: engine applies the exact OU update using the supplied normals
    rng = np.random.default_rng(9)
    state, actuators, _ = random_scene(rng)
    mean = (0.0, 5.0, 0.0)
    sigma, tc, dt = 0.6, 3.0, 0.01
    decay = math.exp(-dt / tc)
    diffusion = sigma * math.sqrt(1.0 - decay * decay)
    normals = np.random.default_rng(10).standard_normal(2 * 50)

    engine = Engine(PARAMS, forces.RHO_AIR, forces.RHO_WATER)
    engine.set_waves(WAVES)
    engine.load_state(state)
    gust = [0.0, 0.0]
    engine.advance(50, dt, actuators, mean, gust, decay, diffusion, normals)

    ref = state
    g = np.zeros(2)
    for i in range(50):
        g = g * decay + diffusion * normals[2 * i : 2 * i + 2]
        wind = np.array([mean[0] + g[0], mean[1] + g[1], mean[2]])
        ref = reference_substep(ref, actuators, wind, WAVES, dt)
    assert max_state_deviation(engine.export_state(), ref) < 1e-9
    assert np.allclose(gust, g, atol=1e-12)
    assert np.allclose(engine.wind, [mean[0] + g[0], mean[1] + g[1], 0.0], atol=1e-12)


def test_engine_reports_capsize():
    engine = Engine(PARAMS, forces.RHO_AIR, forces.RHO_WATER)
    engine.set_waves(WaveField([]))
    rolled = VesselState(
        position=np.array([0.0, 0.0, 0.05]),
        attitude=np.array([CAPSIZE_ROLL - 0.001, 0.0, 0.0]),
        nu=np.array([0.0, 0.0, 0.0, 2.0, 0.0, 0.0]),  # rolling hard
    )
    engine.load_state(rolled)
    status = engine.advance(50, 0.01, ActuatorState(), (0.0, 0.0, 0.0), [0.0, 0.0], 0.0, 0.0, ())
    assert status == "capsize"
    assert abs(engine.export_state().attitude[0]) > CAPSIZE_ROLL


def test_engine_force_breakdown_matches_modular_functions():
    rng = np.random.default_rng(11)
    p = PARAMS
    for _ in range(20):
        state, actuators, wind = random_scene(rng)
        engine = Engine(p, forces.RHO_AIR, forces.RHO_WATER)
        engine.set_waves(WAVES)
        engine.load_state(state)
        engine.wind = wind

        aw = forces.apparent_wind(wind, state)
        keel_flow = -(state.nu[:3] + np.cross(state.nu[3:], p.keel.center_of_effort))
        rudder_flow = -(state.nu[:3] + np.cross(state.nu[3:], p.rudder.center_of_effort))
        expected = {
            "sail": forces.sail_force(p, aw, actuators.boom_angle),
            "keel": forces.foil_force(p.keel, keel_flow, 0.0, forces.RHO_WATER),
            "rudder": forces.foil_force(p.rudder, rudder_flow, actuators.rudder_angle, forces.RHO_WATER),
            "buoyancy": forces.buoyancy_forces(state, WAVES, state.sim_time, p),
            "damping": forces.hull_damping(state.nu, p),
            "propeller": forces.propeller_thrust(actuators.propeller_level, p),
            "gravity": forces.gravity_force(state, p),
        }
        got = engine.force_breakdown(actuators)
        assert set(got) == set(expected)
        for name, vec in expected.items():
            assert np.allclose(got[name], vec, atol=1e-9), name


def test_engine_state_round_trip():
    engine = Engine(PARAMS, forces.RHO_AIR, forces.RHO_WATER)
    state = VesselState(
        position=np.array([1.0, 2.0, 0.1]),
        attitude=np.array([0.01, -0.02, 0.3]),
        nu=np.arange(6, dtype=float) / 10.0,
        sim_time=4.5,
    )
    engine.load_state(state)
    out = engine.export_state()
    assert np.array_equal(out.position, state.position)
    assert np.array_equal(out.attitude, state.attitude)
    assert np.array_equal(out.nu, state.nu)
    assert out.sim_time == state.sim_time
