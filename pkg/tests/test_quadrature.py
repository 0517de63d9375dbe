import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from core.exceptions import ConfigurationError, DomainError
from solver.differences import interior_derivative, is_uniform
from solver.quadrature import (
    composite_gauss_legendre,
    mean_value,
    panel_count,
    reference_fractions,
    segment_rule,
)


class TestPanels:
    def test_panel_count_rounds_up(self):
        assert panel_count(1.0, 0.3) == 4
        assert panel_count(0.9, 0.3) == 3
        assert panel_count(0.0, 0.3) == 0

    def test_non_positive_width_is_rejected(self):
        with pytest.raises(ConfigurationError):
            panel_count(1.0, 0.0)

    def test_reversed_interval_is_rejected(self):
        with pytest.raises(ConfigurationError):
            composite_gauss_legendre(1.0, 0.0, 0.1)

    def test_empty_interval_gives_empty_rule(self):
        nodes, weights = composite_gauss_legendre(2.0, 2.0, 0.1)
        assert nodes.size == 0 and weights.size == 0


class TestCompositeRule:
    """Five-point panels integrate polynomials up to degree nine exactly."""

    def test_degree_nine_is_exact(self):
        nodes, weights = composite_gauss_legendre(0.0, 2.0, 1.0)
        assert_allclose(weights @ nodes**9, 2.0**10 / 10.0, rtol=1e-13)

    def test_nodes_ascend_inside_interval(self):
        nodes, weights = composite_gauss_legendre(-1.0, 3.0, 0.25)
        assert np.all(np.diff(nodes) > 0)
        assert nodes[0] > -1.0 and nodes[-1] < 3.0
        assert_allclose(weights.sum(), 4.0, rtol=1e-14)

    @given(
        st.floats(min_value=-5.0, max_value=5.0),
        st.floats(min_value=0.1, max_value=10.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_exponential_integral(self, a, length):
        b = a + length
        nodes, weights = composite_gauss_legendre(a, b, 0.05)
        exact = math.exp(-a) - math.exp(-b)
        assert_allclose(weights @ np.exp(-nodes), exact, rtol=1e-12)

    def test_segment_rule_sums_per_segment(self):
        breakpoints = np.array([0.0, 0.3, 1.0, 1.0, 2.5])
        nodes, weights, segments = segment_rule(breakpoints, 0.2)
        sums = np.bincount(segments, weights=weights, minlength=breakpoints.size - 1)
        assert_allclose(sums, np.diff(breakpoints), atol=1e-15)
        assert nodes.size == weights.size == segments.size

    def test_segment_rule_rejects_descending_breakpoints(self):
        with pytest.raises(ConfigurationError):
            segment_rule(np.array([0.0, 1.0, 0.5]), 0.1)

    def test_mean_value_of_linear_function(self):
        x = 3.0
        samples = 2.0 + x * reference_fractions()
        assert_allclose(mean_value(samples), 2.0 + 0.5 * x, rtol=1e-14)


class TestDifferences:
    def test_uniformity(self):
        assert is_uniform(np.linspace(0.0, 1.0, 11))
        assert not is_uniform(np.array([0.0, 0.1, 0.3]))

    def test_fourth_order_on_sine(self):
        grid = np.linspace(-2.0, 2.0, 401)
        derivative = interior_derivative(np.sin(grid), grid)
        assert np.max(np.abs(derivative - np.cos(grid[1:-1]))) < 1e-8

    def test_quartic_is_differentiated_exactly(self):
        grid = np.linspace(0.0, 1.0, 21)
        values = grid**4 - 2.0 * grid**3 + grid
        expected = 4.0 * grid**3 - 6.0 * grid**2 + 1.0
        assert_allclose(interior_derivative(values, grid), expected[1:-1], atol=1e-9)

    def test_non_uniform_grid_falls_back(self):
        grid = np.sort(np.concatenate([np.linspace(0.0, 1.0, 200), [0.50005]]))
        derivative = interior_derivative(np.exp(grid), grid)
        assert np.max(np.abs(derivative - np.exp(grid[1:-1]))) < 1e-3

    def test_too_few_points(self):
        with pytest.raises(DomainError):
            interior_derivative(np.zeros(2), np.array([0.0, 1.0]))
