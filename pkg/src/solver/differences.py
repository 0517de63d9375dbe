"""Finite-difference derivatives on sampled profiles."""

import numpy as np

from core.exceptions import DomainError


def is_uniform(grid: np.ndarray, rtol: float = 1e-9) -> bool:
    """True when all spacings of ``grid`` agree to ``rtol``."""
    steps = np.diff(grid)
    if steps.size == 0:
        return True
    return bool(np.all(np.abs(steps - steps[0]) <= rtol * abs(steps[0])))


def interior_derivative(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """
    Derivative at the interior points ``grid[1:-1]``.

    Uniform grids with at least five points use fourth-order stencils
    (centred in the bulk, shifted next to the ends); anything else falls
    back to second-order ``numpy.gradient``.

    Args:
        values: Sampled function values.
        grid: Strictly increasing abscissae of the same length.

    Returns:
        Array of length ``len(grid) - 2``.
    """
    values = np.asarray(values, dtype=float)
    grid = np.asarray(grid, dtype=float)
    n = grid.size
    if n < 3:
        raise DomainError(f"Need at least 3 points for a derivative, got {n}")

    if n < 5 or not is_uniform(grid):
        return np.gradient(values, grid, edge_order=2)[1:-1]

    step = (grid[-1] - grid[0]) / (n - 1)
    f = values
    out = np.empty(n - 2)
    # bulk: indices 2 .. n-3
    out[1:-1] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * step)
    out[0] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * step)
    out[-1] = (
        3.0 * f[-1] + 10.0 * f[-2] - 18.0 * f[-3] + 6.0 * f[-4] - f[-5]
    ) / (12.0 * step)
    return out
