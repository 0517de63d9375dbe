import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from core.exceptions import ConfigurationError, DomainError, LeafFunctionTypeError
from singular.circle import CircleWeight, circle_obstruction
from singular.phi_line import PhiProfile, naive_singular_demos, singular_line_solve
from solver.leaf_function import ConstantFunction
from solver.leaf_function_factory import LeafFunctionFactory

E_INV = math.exp(-1.0)


@pytest.fixture(scope="module")
def wide_grid() -> np.ndarray:
    return np.union1d(np.linspace(-50.0, 50.0, 10001), [-1e-6, 1e-6])


@pytest.fixture(scope="module")
def unit_solution(wide_grid):
    return singular_line_solve(ConstantFunction(1.0), wide_grid)


class TestPhiProfile:
    def test_values(self):
        phi = PhiProfile()
        assert_allclose(phi(np.array([-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0])), [-1.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.0])


class TestSingularLine:
    """``phi (x e^{|x|} u)' = x e^{|x|} v`` solved branch by branch."""

    def test_bounded_by_three(self, unit_solution):
        assert unit_solution.sup_abs <= 3.0 + 1e-6

    def test_junctions_match(self, unit_solution):
        assert unit_solution.matches()
        assert max(unit_solution.junction_gaps.values()) <= 1e-6

    def test_limits_at_zero(self, unit_solution):
        assert unit_solution.u1.at(1e-6) == pytest.approx(1.0, abs=1e-5)
        assert unit_solution.u3.at(-1e-6) == pytest.approx(1.0, abs=1e-5)

    def test_branches_match_closed_forms(self, unit_solution):
        u1, u2, u3, u4 = unit_solution.u1, unit_solution.u2, unit_solution.u3, unit_solution.u4
        x = u1.grid[u1.grid > 0]
        assert_allclose(u1.values[u1.grid > 0], -np.expm1(-x) / x, atol=1e-8)
        x = u3.grid[u3.grid < 0]
        assert_allclose(u3.values[u3.grid < 0], np.expm1(x) / x, atol=1e-8)
        x = u2.grid
        assert_allclose(u2.values, (x - 1.0 + (1.0 - E_INV) * np.exp(1.0 - x)) / x, atol=1e-8)
        x = u4.grid
        assert_allclose(u4.values, (x + 1.0 - (1.0 - E_INV) * np.exp(x + 1.0)) / x, atol=1e-8)

    def test_values_next_to_zero_use_the_mean(self):
        grid = np.union1d(np.linspace(-2.0, 2.0, 401), [-2e-8, 1e-8, 5e-8])
        solution = singular_line_solve(ConstantFunction(1.0), grid)
        x = np.array([1e-8, 5e-8])
        assert_allclose([solution.u1.at(t) for t in x], -np.expm1(-x) / x, rtol=1e-13)
        assert solution.u3.at(-2e-8) == pytest.approx(np.expm1(-2e-8) / -2e-8, rel=1e-13)
        assert solution.u1.at(0.0) == pytest.approx(1.0, rel=1e-14)

    def test_zero_value_is_data_at_zero(self, wide_grid):
        solution = singular_line_solve(LeafFunctionFactory.create_leaf_function("cos"), wide_grid)
        assert solution.u1.at(0.0) == pytest.approx(1.0, rel=1e-14)
        assert solution.u3.at(0.0) == pytest.approx(1.0, rel=1e-14)

    def test_residual(self, unit_solution):
        assert unit_solution.residual_sup is not None
        assert unit_solution.residual_sup <= 1e-4

    def test_merged_covers_grid(self, unit_solution, wide_grid):
        grid, values = unit_solution.merged()
        assert_allclose(grid, wide_grid)
        assert np.all(np.diff(grid) > 0)
        assert values.size == wide_grid.size

    def test_at_requires_grid_point(self, unit_solution):
        with pytest.raises(DomainError):
            unit_solution.u1.at(0.123456789)

    @given(st.floats(min_value=-3.0, max_value=3.0))
    @settings(max_examples=10, deadline=None)
    def test_constant_bound(self, c):
        grid = np.linspace(-5.0, 5.0, 1001)
        solution = singular_line_solve(ConstantFunction(c), grid)
        assert solution.sup_abs <= 3.0 * abs(c) + 1e-6

    def test_oscillating_data(self):
        v = LeafFunctionFactory.create_leaf_function("sin:k=2")
        solution = singular_line_solve(v, np.linspace(-10.0, 10.0, 2001))
        assert solution.sup_abs <= 3.0
        assert solution.matches()

    def test_grid_without_junctions(self):
        with pytest.raises(ConfigurationError):
            singular_line_solve(ConstantFunction(1.0), np.linspace(-2.05, 2.05, 100))

    def test_grid_too_short(self):
        with pytest.raises(ConfigurationError):
            singular_line_solve(ConstantFunction(1.0), np.linspace(-1.5, 1.5, 301))


class TestNaiveDemos:
    @pytest.mark.parametrize("name", ["log", "linear", "exponential"])
    def test_rejected_formulations_grow(self, name):
        assert naive_singular_demos().by_name(name).grows

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            naive_singular_demos().by_name("quadratic")


class TestCircleObstruction:
    """``sin(theta) (f u)' = f v`` has no periodic solution unless the obstruction vanishes."""

    def test_zero_data_has_no_defect(self, cfg):
        assert circle_obstruction(ConstantFunction(0.0), cfg=cfg).defect <= 1e-12

    def test_constant_data_diverges_logarithmically(self, cfg):
        report = circle_obstruction(ConstantFunction(1.0), cfg=cfg)
        assert report.divergent
        assert report.predicted_slopes == pytest.approx((-2.0, 2.0))
        assert max(report.slope_errors) <= 0.2
        assert report.defects == sorted(report.defects)

    def test_sine_has_finite_net_change(self, cfg):
        report = circle_obstruction(LeafFunctionFactory.create_leaf_function("sin"), cfg=cfg)
        assert not report.divergent
        assert report.defect == pytest.approx(2.0 * math.pi - 4e-4, abs=1e-8)

    def test_multiplier_absorbs_convergent_change(self, cfg):
        weight = CircleWeight(rate=0.1)
        report = circle_obstruction(LeafFunctionFactory.create_leaf_function("sin"), weight, cfg=cfg)
        assert report.absorbable
        assert report.defect == 0.0
        assert report.multiplier == pytest.approx(math.exp(0.2 * math.pi))

    def test_weight_is_quasi_periodic(self):
        weight = CircleWeight(rate=0.3, modulation=0.5)
        theta = np.linspace(0.0, 2.0 * math.pi, 9)
        assert_allclose(weight(theta + 2.0 * math.pi), weight.multiplier * weight(theta), rtol=1e-12)

    def test_non_periodic_data(self, cfg):
        with pytest.raises(LeafFunctionTypeError):
            circle_obstruction(LeafFunctionFactory.create_leaf_function("poly:c0=1"), cfg=cfg)

    @pytest.mark.parametrize("cutoffs", [(1e-2,), (1e-2, 1e-2), (0.0, 1e-3), (2.0, 1e-3)])
    def test_bad_cutoffs(self, cutoffs, cfg):
        with pytest.raises(ConfigurationError):
            circle_obstruction(ConstantFunction(1.0), cutoffs=cutoffs, cfg=cfg)
