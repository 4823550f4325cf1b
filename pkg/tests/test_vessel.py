import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sailsim.errors import ConfigurationError
from sailsim.vessel import (
    CoefficientTable,
    VesselState,
    default_eboat_params,
    interpolate_coefficients,
    param_violations,
    table_from_degrees,
    validate_params,
    with_overrides,
    wrap_angle,
)

finite_angles = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


@given(finite_angles)
def test_wrap_angle_range(a):
    w = wrap_angle(a)
    assert -math.pi < w <= math.pi


@given(finite_angles)
def test_wrap_angle_preserves_angle(a):
    w = wrap_angle(a)
    assert math.isclose(math.sin(w), math.sin(a), abs_tol=1e-6)
    assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-6)


def test_wrap_angle_near_identity_inside_range():
    for a in (-3.1, -1.0, 0.0, 0.5, math.pi):
        assert math.isclose(wrap_angle(a), a, abs_tol=1e-12)


def test_wrap_angle_boundary():
    # pi stays pi; -pi maps to pi (range is half-open at -pi)
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi


def test_wrap_angle_vectorized():
    a = np.array([0.0, 4.0, -4.0, 7.0])
    w = wrap_angle(a)
    assert w.shape == a.shape
    assert np.all((-math.pi < w) & (w <= math.pi))


class TestCoefficientTable:
    def test_lookup_at_samples(self):
        t = CoefficientTable([(0.0, 0.0, 0.1), (1.0, 0.8, 0.2), (math.pi, 0.0, 0.5)])
        assert t.lookup(0.0) == (0.0, 0.1)
        assert t.lookup(1.0) == (0.8, 0.2)

    def test_linear_interpolation(self):
        t = CoefficientTable([(0.0, 0.0, 0.0), (2.0, 1.0, 0.4), (math.pi, 0.0, 0.0)])
        cl, cd = t.lookup(1.0)
        assert math.isclose(cl, 0.5)
        assert math.isclose(cd, 0.2)

    def test_cl_is_odd_cd_is_even(self):
        t = table_from_degrees([(0, 0.0, 0.05), (30, 1.0, 0.1), (180, 0.0, 0.3)])
        clp, cdp = t.lookup(math.radians(20))
        cln, cdn = t.lookup(math.radians(-20))
        assert cln == -clp
        assert cdn == cdp

    def test_lookup_wraps_alpha(self):
        t = table_from_degrees([(0, 0.0, 0.05), (30, 1.0, 0.1), (180, 0.0, 0.3)])
        a, b = t.lookup(math.radians(20) + 2 * math.pi), t.lookup(math.radians(20))
        assert math.isclose(a[0], b[0], abs_tol=1e-12)
        assert math.isclose(a[1], b[1], abs_tol=1e-12)

    @given(st.floats(min_value=-10.0, max_value=10.0, allow_nan=False))
    def test_lookup_bounded_by_table(self, alpha):
        t = default_eboat_params().sail.coefficients
        cl, cd = t.lookup(alpha)
        assert abs(cl) <= max(abs(c) for c in t.cl) + 1e-12
        assert 0.0 <= cd <= max(t.cd) + 1e-12

    def test_functional_alias(self):
        t = default_eboat_params().keel.coefficients
        assert interpolate_coefficients(t, 0.3) == t.lookup(0.3)

    def test_rejects_unsorted_alpha(self):
        with pytest.raises(ConfigurationError, match="strictly increasing"):
            CoefficientTable([(0.0, 0, 0), (2.0, 1, 0), (1.0, 0, 0), (math.pi, 0, 0)])

    def test_rejects_missing_endpoints(self):
        with pytest.raises(ConfigurationError, match="alpha=0"):
            CoefficientTable([(0.1, 0, 0), (math.pi, 0, 0)])
        with pytest.raises(ConfigurationError, match="alpha=pi"):
            CoefficientTable([(0.0, 0, 0), (3.0, 0, 0)])

    def test_rejects_negative_drag(self):
        with pytest.raises(ConfigurationError, match="C_D"):
            CoefficientTable([(0.0, 0.0, -0.1), (math.pi, 0.0, 0.0)])

    def test_rejects_empty(self):
        with pytest.raises(ConfigurationError):
            CoefficientTable([])

    def test_max_slope(self):
        t = CoefficientTable([(0.0, 0.0, 0.0), (1.0, 2.0, 0.5), (math.pi, 0.0, 0.0)])
        assert math.isclose(t.max_slope(), 2.0)


class TestVesselState:
    def test_wraps_attitude(self):
        s = VesselState(position=np.zeros(3), attitude=np.array([0.0, 0.0, 7.0]), nu=np.zeros(6))
        assert -math.pi < s.attitude[2] <= math.pi

    def test_at_rest(self):
        s = VesselState.at_rest(north=1.0, east=2.0, heading=0.5)
        assert s.position[0] == 1.0 and s.position[1] == 2.0
        assert np.all(s.nu == 0.0)
        assert s.sim_time == 0.0

    def test_is_finite(self):
        assert VesselState.at_rest().is_finite()
        bad = VesselState(position=np.array([np.nan, 0, 0]), attitude=np.zeros(3), nu=np.zeros(6))
        assert not bad.is_finite()


class TestParamValidation:
    def test_defaults_are_valid(self):
        assert param_violations(default_eboat_params()) == []
        validate_params(default_eboat_params())

    def test_negative_mass(self, params):
        bad = with_overrides(params, mass=-1.0)
        assert any("mass" in v for v in param_violations(bad))

    def test_indefinite_inertia(self, params):
        bad = with_overrides(params, inertia=np.diag([-1.0, 1.0, 1.0]))
        assert any("positive definite" in v for v in param_violations(bad))

    def test_wrong_quadrant_count(self, params):
        bad = with_overrides(params, hull_quadrants=params.hull_quadrants[:3])
        assert any("4 quadrants" in v for v in param_violations(bad))

    def test_non_unit_chord(self, params):
        from dataclasses import replace

        bad_sail = replace(params.sail, chord_direction=np.array([-2.0, 0.0, 0.0]))
        bad = with_overrides(params, sail=bad_sail)
        assert any("unit length" in v for v in param_violations(bad))

    def test_bad_propeller_levels(self, params):
        from sailsim.vessel import PropellerParams

        bad = with_overrides(
            params,
            propeller=PropellerParams(levels={0: 0.0, 1: 5.0}, position=np.zeros(3)),
        )
        assert any("propeller.levels" in v for v in param_violations(bad))

    def test_validate_raises_with_all_violations(self, params):
        bad = with_overrides(params, mass=-1.0, draft_ref=-1.0)
        with pytest.raises(ConfigurationError) as exc:
            validate_params(bad)
        assert len(exc.value.violations) >= 2


def test_propeller_thrust_table(params):
    assert params.propeller.thrust(0) == 0.0
    assert params.propeller.thrust(params.propeller.max_level) > 0.0
    assert params.propeller.thrust(-1) <= 0.0
