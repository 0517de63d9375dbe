import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from core.exceptions import ConfigurationError, LeafFunctionTypeError, OutOfAnnulusError
from geometry.annulus_function import AnnulusFunction
from geometry.asymptotics import (
    asymptotic_envelope,
    asymptotic_gap,
    circle_solve,
    spiral_solve,
)
from geometry.spiral import (
    SpiralChart,
    cartesian_to_chart,
    chart_to_cartesian,
    induced_field_at,
    spiral_radius,
)
from geometry.torus import SQRT2, TorusFlow, TorusFunction, torus_solve
from solver.leaf_function import ConstantFunction

FIXTURE = "annulus:c0=-1,c1=1,trig=cos"


class TestTorus:
    def test_spec_parsing(self):
        v = TorusFunction.from_spec("torus:c=0.5,cos_1_0=1,sin_1_1=0.5")
        assert v.bound == pytest.approx(2.0)
        assert v(0.0, 0.0) == pytest.approx(1.5)
        assert v(0.25, 0.0) == pytest.approx(0.5 + 0.5, abs=1e-15)

    def test_unknown_mode_key(self):
        with pytest.raises(ConfigurationError):
            TorusFunction.from_spec("torus:c=1,tan_1_0=1")

    def test_leaf_through_point(self):
        flow = TorusFlow()
        offset = flow.offset_through(0.3, 0.7)
        x, y = flow.leaf_point(0.3, offset)
        assert x == pytest.approx(0.3)
        assert y == pytest.approx(0.7)
        assert flow.slope == SQRT2

    def test_constant_is_absorbed(self, cfg):
        profile = torus_solve(TorusFunction(constant=1.0), 0.1, np.linspace(0.0, 1.0, 51), cfg)
        assert np.max(np.abs(profile.values - 1.0)) <= 1e-9

    @pytest.mark.parametrize("offset", [0.0, 0.25, 0.8])
    def test_periodic_in_x(self, offset, cfg):
        v = TorusFunction.from_spec("torus:c=0.5,cos_1_0=1,sin_1_1=0.5")
        profile = torus_solve(v, offset, np.linspace(0.0, 1.0, 101), cfg)
        assert profile.periodicity_defect <= 2.0 * cfg.epsilon
        assert profile.metadata["slope"] == SQRT2

    def test_residual_on_fine_grid(self, cfg):
        v = TorusFunction.from_spec("torus:c=0.5,cos_1_0=1")
        profile = torus_solve(v, 0.3, np.linspace(0.0, 1.0, 401), cfg)
        assert profile.residual_sup <= 1e-6

    def test_needs_torus_function(self, cfg):
        with pytest.raises(LeafFunctionTypeError):
            torus_solve(ConstantFunction(1.0), 0.0, [0.0, 0.5], cfg)


class TestSpiralChart:
    """The chart ``(theta, s) -> r(theta + s) e^{i theta}`` of the open annulus."""

    def test_round_trip_on_lattice(self):
        thetas, labels = np.meshgrid(
            np.linspace(-6.0 * math.pi, 6.0 * math.pi, 100), np.linspace(-3.0, 3.0, 100)
        )
        back_theta, back_s = cartesian_to_chart(*chart_to_cartesian(thetas, labels))
        assert np.max(np.abs(back_theta - thetas)) <= 1e-10
        assert np.max(np.abs(back_s - labels)) <= 1e-10

    def test_radius_tends_to_boundary_circles(self):
        assert spiral_radius(-1e8) == pytest.approx(1.0, abs=1e-8)
        assert spiral_radius(1e8) == pytest.approx(2.0, abs=1e-8)
        assert spiral_radius(0.0) == 1.5

    @pytest.mark.parametrize("point", [(0.5, 0.0), (2.0, 0.0), (0.0, -3.0)])
    def test_points_outside_are_rejected(self, point):
        with pytest.raises(OutOfAnnulusError):
            cartesian_to_chart(*point)

    def test_tangent_matches_difference_quotient(self):
        chart = SpiralChart(s=0.4)
        theta, h = 1.3, 1e-6
        forward = np.array(chart.point(theta + h))
        backward = np.array(chart.point(theta - h))
        assert_allclose(np.array(chart.tangent(theta)), (forward - backward) / (2.0 * h), atol=1e-8)

    @given(st.floats(min_value=-20.0, max_value=20.0), st.floats(min_value=-3.0, max_value=3.0))
    @settings(max_examples=50, deadline=None)
    def test_induced_field_is_leaf_tangent(self, theta, s):
        x, y = chart_to_cartesian(theta, s)
        field = induced_field_at(x, y)
        tangent = SpiralChart(s=s).tangent(theta)
        assert_allclose([field.F, field.G], tangent, atol=1e-8)

    def test_label_range(self):
        with pytest.raises(ValueError):
            SpiralChart(s=4.0)


class TestAnnulusFunction:
    def test_fixture_vanishes_on_inner_circle(self):
        v = AnnulusFunction.from_spec(FIXTURE)
        theta = np.linspace(0.0, 2.0 * math.pi, 17)
        assert_allclose(v.circle_restriction(1.0)(theta), 0.0, atol=1e-15)
        assert_allclose(v.circle_restriction(2.0)(theta), np.cos(theta), atol=1e-15)

    def test_partials_match_differences(self):
        v = AnnulusFunction.from_spec("annulus:c0=1,c2=0.5,trig=sin,k=2+c1=1")
        r, theta, h = 1.4, 0.7, 1e-6
        d_r, d_theta = v.partials(r, theta)
        assert d_r == pytest.approx((v(r + h, theta) - v(r - h, theta)) / (2.0 * h), abs=1e-7)
        assert d_theta == pytest.approx((v(r, theta + h) - v(r, theta - h)) / (2.0 * h), abs=1e-7)

    def test_describe_round_trips(self):
        v = AnnulusFunction.from_spec(FIXTURE)
        assert AnnulusFunction.from_spec(v.describe()) == v

    def test_only_boundary_radii(self):
        with pytest.raises(ConfigurationError):
            AnnulusFunction.from_spec(FIXTURE).circle_restriction(1.5)


class TestAsymptotics:
    """Spiral solutions approach the boundary-circle solutions."""

    def test_constant_along_spiral(self, cfg):
        v = AnnulusFunction.from_spec("const:1")
        profile = spiral_solve(v, 0.0, np.linspace(-20.0, 20.0, 201), cfg)
        assert np.max(np.abs(profile.values - 1.0)) <= 1e-9
        assert profile.metadata == {"leaf": "spiral", "s": 0.0}

    def test_outer_circle_solution(self, cfg):
        theta = np.linspace(0.0, 2.0 * math.pi, 65)[:-1]
        profile = circle_solve(AnnulusFunction.from_spec(FIXTURE), 2.0, theta, cfg)
        assert_allclose(profile.values, 0.5 * (np.cos(theta) + np.sin(theta)), atol=1e-12)

    @pytest.mark.parametrize("theta", [-5.0, -10.0, -20.0])
    def test_gap_is_below_radial_distance(self, theta, cfg):
        v = AnnulusFunction.from_spec(FIXTURE)
        assert asymptotic_gap(v, 0.0, theta, cfg) <= spiral_radius(theta) - 1.0 + 1e-9

    def test_envelope_decreases_towards_inner_circle(self, fast_cfg):
        v = AnnulusFunction.from_spec(FIXTURE)
        envelopes = [asymptotic_envelope(v, 0.0, theta, fast_cfg, samples=65) for theta in (-5.0, -10.0, -15.0, -20.0)]
        assert all(later < earlier for earlier, later in zip(envelopes, envelopes[1:]))

    def test_envelope_small_far_along_the_spiral(self, fast_cfg):
        v = AnnulusFunction.from_spec(FIXTURE)
        assert asymptotic_envelope(v, 0.0, -400.0, fast_cfg, samples=65) < 1e-3

    def test_outer_gap_vanishes_for_constants(self, cfg):
        v = AnnulusFunction.from_spec("const:2")
        assert asymptotic_gap(v, 0.5, 30.0, cfg) <= 1e-9
