import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.integrate import quad

from core.exceptions import (
    ConfigurationError,
    DomainError,
    LeafFunctionTypeError,
    SingularCoefficientError,
)
from solver.leaf_function import ConstantFunction, PolynomialFunction, TrigonometricFunction
from solver.leaf_function_factory import LeafFunctionFactory
from solver.line_operator import (
    line_kernel,
    ode_residual,
    solve_on_line,
    solve_periodic,
    solve_with_coefficient,
)
from solver.operator_config import OperatorConfig, truncation_bound
from solver.profile import as_grid

CATALOG = (
    "const:1",
    "sin",
    "cos",
    "poly:c0=1,c1=-0.5,c2=0.25,c3=-0.1,lo=-3,hi=3",
    "fourier:P=6.283185307179586,a0=0.5,a1=1,b2=0.5",
)


@st.composite
def trigonometric_data(draw):
    """Low-frequency trigonometric polynomials with bounded coefficients."""
    size = draw(st.integers(min_value=1, max_value=2))
    coefficient = st.floats(min_value=-1.0, max_value=1.0)
    cosines = [draw(coefficient) for _ in range(size)]
    sines = [draw(coefficient) for _ in range(size)]
    period = draw(st.floats(min_value=6.0, max_value=12.0))
    return TrigonometricFunction(period, draw(coefficient), cosines, sines)


@st.composite
def trigonometric_pairs(draw):
    """Two trigonometric polynomials on one period with mixing weights."""
    period = draw(st.floats(min_value=6.0, max_value=12.0))
    coefficient = st.floats(min_value=-1.0, max_value=1.0)
    parts = [
        (draw(coefficient), [draw(coefficient) for _ in range(2)], [draw(coefficient) for _ in range(2)])
        for _ in range(2)
    ]
    alpha = draw(st.floats(min_value=-2.0, max_value=2.0))
    beta = draw(st.floats(min_value=-2.0, max_value=2.0))
    return period, parts, alpha, beta


class TestTruncation:
    def test_bound_formula(self):
        assert truncation_bound(1.0, 1e-9) == pytest.approx(math.log(4e9))

    @pytest.mark.parametrize("bound,epsilon", [(0.0, 1e-9), (1.0, 0.0), (math.inf, 1e-9)])
    def test_invalid_inputs(self, bound, epsilon):
        with pytest.raises(DomainError):
            truncation_bound(bound, epsilon)

    def test_length_includes_margin(self, cfg):
        assert cfg.truncation_length(2.0) == pytest.approx(math.log(8e9) + 2.0)

    def test_override_is_used(self, cfg):
        assert cfg.with_truncation(5.0).truncation_length(1.0) == 5.0

    def test_step_must_stay_below_truncation(self):
        with pytest.raises(ConfigurationError):
            line_kernel(0.01, OperatorConfig(quad_step=0.05))

    def test_zero_margin_keeps_two_panels(self):
        cfg = OperatorConfig(margin=0.0)
        assert cfg.truncation_length(0.0) == pytest.approx(2.0 * cfg.quad_step)


class TestSolveOnLine:
    """``u + u' = v`` on a line leaf."""

    def test_constant_is_absorbed(self, cfg, line_grid):
        profile = solve_on_line(ConstantFunction(1.0), line_grid, cfg)
        assert np.max(np.abs(profile.values - 1.0)) <= 1e-9

    @pytest.mark.parametrize("spec", CATALOG)
    def test_catalog_residuals(self, spec, cfg, line_grid):
        v = LeafFunctionFactory.create_leaf_function(spec)
        profile = solve_on_line(v, line_grid, cfg)
        assert profile.residual_sup <= 1e-6
        assert profile.residual_sup == pytest.approx(ode_residual(profile, v))

    @pytest.mark.parametrize("spec", CATALOG)
    def test_doubling_truncation_changes_little(self, spec, cfg, line_grid):
        v = LeafFunctionFactory.create_leaf_function(spec)
        profile = solve_on_line(v, line_grid, cfg)
        deeper = solve_on_line(v, line_grid, cfg.with_truncation(2.0 * profile.truncation))
        assert np.max(np.abs(deeper.values - profile.values)) <= 0.5 * cfg.epsilon

    def test_cosine_closed_form(self, cfg, line_grid):
        profile = solve_on_line(LeafFunctionFactory.create_leaf_function("cos"), line_grid, cfg)
        expected = 0.5 * (np.cos(line_grid) + np.sin(line_grid))
        assert np.max(np.abs(profile.values - expected)) <= 2.0 * cfg.epsilon

    def test_sine_closed_form(self, cfg, line_grid):
        profile = solve_on_line(LeafFunctionFactory.create_leaf_function("sin"), line_grid, cfg)
        expected = 0.5 * (np.sin(line_grid) - np.cos(line_grid))
        assert np.max(np.abs(profile.values - expected)) <= 2.0 * cfg.epsilon

    def test_zero_data_with_zero_margin(self, line_grid):
        cfg = OperatorConfig(margin=0.0)
        profile = solve_on_line(ConstantFunction(0.0), line_grid, cfg)
        assert np.all(profile.values == 0.0)
        assert profile.truncation > cfg.quad_step

    def test_matches_adaptive_quadrature(self, cfg):
        v = PolynomialFunction([1.0, -0.5, 0.25], (-3.0, 3.0))
        x = 0.4
        profile = solve_on_line(v, [x], cfg)
        expected, _ = quad(lambda t: math.exp(t - x) * float(v(np.array([t]))[0]), -60.0, x, points=[-3.0], limit=200)
        assert profile.values[0] == pytest.approx(expected, abs=1e-9)
        assert profile.residual_sup is None

    @given(trigonometric_data())
    @settings(max_examples=15, deadline=None)
    def test_residual_for_random_trigonometric_data(self, v):
        grid = np.linspace(-1.0, 1.0, 201)
        profile = solve_on_line(v, grid, OperatorConfig())
        assert profile.residual_sup <= 1e-6

    @given(trigonometric_pairs())
    @settings(max_examples=15, deadline=None)
    def test_solution_is_linear_in_data(self, pair):
        period, ((c1, a1, b1), (c2, a2, b2)), alpha, beta = pair
        first = TrigonometricFunction(period, c1, a1, b1)
        second = TrigonometricFunction(period, c2, a2, b2)
        mixed = TrigonometricFunction(
            period,
            alpha * c1 + beta * c2,
            [alpha * x + beta * y for x, y in zip(a1, a2)],
            [alpha * x + beta * y for x, y in zip(b1, b2)],
        )
        cfg = OperatorConfig()
        grid = np.linspace(-1.0, 1.0, 41)
        combined = (
            alpha * solve_on_line(first, grid, cfg).values
            + beta * solve_on_line(second, grid, cfg).values
        )
        scale = 1.0 + abs(alpha) + abs(beta)
        assert np.max(np.abs(solve_on_line(mixed, grid, cfg).values - combined)) <= scale * cfg.epsilon

    @given(st.floats(min_value=-5.0, max_value=5.0))
    @settings(max_examples=20, deadline=None)
    def test_solution_is_bounded_by_data(self, c):
        grid = np.linspace(-1.0, 1.0, 21)
        profile = solve_on_line(ConstantFunction(c), grid, OperatorConfig())
        assert np.max(np.abs(profile.values)) <= abs(c) + 1e-9

    def test_clamped_data_is_flagged(self, cfg):
        v = PolynomialFunction([0.0, 1.0], (-1.0, 1.0))
        assert solve_on_line(v, [0.0, 0.5], cfg).clamped

    def test_shifted_clamped_data_is_flagged(self, cfg):
        v = PolynomialFunction([0.0, 1.0], (-1.0, 1.0)).shifted(0.5)
        assert solve_on_line(v, [0.0, 0.5], cfg).clamped

    def test_profile_is_read_only(self, cfg, line_grid):
        profile = solve_on_line(ConstantFunction(1.0), line_grid, cfg)
        with pytest.raises(ValueError):
            profile.values[0] = 2.0

    @pytest.mark.parametrize("grid", [[], [0.0, 0.0, 1.0], [1.0, 0.0], [0.0, math.nan]])
    def test_bad_grids(self, grid):
        with pytest.raises(ConfigurationError):
            as_grid(grid)

    def test_residual_needs_three_points(self, cfg):
        v = ConstantFunction(1.0)
        profile = solve_on_line(v, [0.0, 1.0], cfg)
        with pytest.raises(DomainError):
            ode_residual(profile, v)


class TestSolvePeriodic:
    def test_cosine_on_closed_leaf(self, cfg):
        theta = np.linspace(0.0, 2.0 * math.pi, 129)[:-1]
        v = LeafFunctionFactory.create_leaf_function("cos")
        profile = solve_periodic(v, theta, cfg)
        assert profile.periodicity_defect <= 2.0 * cfg.epsilon
        assert_allclose(profile.values, 0.5 * (np.cos(theta) + np.sin(theta)), atol=1e-12)
        assert profile.metadata["period"] == pytest.approx(2.0 * math.pi)

    def test_agrees_with_line_solution(self, cfg, line_grid):
        v = LeafFunctionFactory.create_leaf_function("fourier:P=3,a0=0.2,a1=0.5,b3=0.25")
        closed = solve_periodic(v, line_grid, cfg)
        line = solve_on_line(v, line_grid, cfg)
        assert np.max(np.abs(closed.values - line.values)) <= 2.0 * cfg.epsilon

    def test_multiple_of_period_is_accepted(self, cfg):
        v = LeafFunctionFactory.create_leaf_function("sin:P=1")
        profile = solve_periodic(v, [0.0, 0.25, 0.5], cfg, period=3.0)
        assert profile.periodicity_defect <= 2.0 * cfg.epsilon

    def test_non_periodic_kind_is_rejected(self, cfg):
        v = LeafFunctionFactory.create_leaf_function("poly:c0=1,c1=1")
        with pytest.raises(LeafFunctionTypeError):
            solve_periodic(v, [0.0, 1.0], cfg)

    def test_incommensurate_period_is_rejected(self, cfg):
        v = LeafFunctionFactory.create_leaf_function("sin:P=2")
        with pytest.raises(LeafFunctionTypeError):
            solve_periodic(v, [0.0, 1.0], cfg, period=3.0)

    def test_constant_needs_explicit_period(self, cfg):
        with pytest.raises(ConfigurationError):
            solve_periodic(ConstantFunction(1.0), [0.0, 1.0], cfg)


class TestVariableCoefficient:
    def test_constant_coefficient_scales(self, cfg, line_grid):
        profile = solve_with_coefficient(ConstantFunction(1.0), ConstantFunction(2.0), line_grid, cfg)
        assert np.max(np.abs(profile.values - 0.5)) <= 1e-9

    def test_periodic_coefficient_records_defect(self, cfg, line_grid):
        v = LeafFunctionFactory.create_leaf_function("cos")
        a = LeafFunctionFactory.create_leaf_function("fourier:P=6.283185307179586,a0=2,a1=0.5")
        profile = solve_with_coefficient(v, a, line_grid, cfg)
        assert profile.periodicity_defect <= 2.0 * cfg.epsilon

    def test_vanishing_coefficient_is_rejected(self, cfg):
        with pytest.raises(SingularCoefficientError):
            solve_with_coefficient(
                ConstantFunction(1.0), PolynomialFunction([0.0, 1.0], (-1.0, 1.0)), [-0.5, 0.0, 0.5], cfg
            )
