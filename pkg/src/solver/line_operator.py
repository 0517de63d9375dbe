"""
Weighted-integral solution operator for ``u + du/dt = v`` on a single leaf.

The bounded solution is the average of ``v`` against the probability
density ``e^{-s}`` on ``[0, inf)``::

    u(t) = int_0^inf e^{-s} v(t - s) ds

On the line the integral is cut at depth ``L`` and evaluated with
composite Gauss–Legendre panels. Periodic inputs use the geometric-series
reduction to one period, which carries no truncation error.
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from core.exceptions import (
    ConfigurationError,
    DomainError,
    LeafFunctionTypeError,
    SingularCoefficientError,
)
from solver.differences import interior_derivative
from solver.leaf_function import BaseLeafFunction
from solver.operator_config import OperatorConfig
from solver.profile import SolutionProfile, as_grid
from solver.quadrature import composite_gauss_legendre

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

# largest evaluation block, in function values
_CHUNK_ELEMENTS = 2_000_000


def _convolve(
    v: BaseLeafFunction, points: np.ndarray, lags: np.ndarray, kernel: np.ndarray
) -> Tuple[np.ndarray, bool]:
    """Apply ``sum_j kernel_j v(point - lag_j)`` at every point, in blocks."""
    out = np.empty(points.size)
    clamped = False
    rows = max(1, _CHUNK_ELEMENTS // max(1, lags.size))
    for start in range(0, points.size, rows):
        block = points[start : start + rows]
        args = block[:, None] - lags[None, :]
        clamped = clamped or v.clamps(args)
        out[start : start + rows] = v.evaluate_checked(args) @ kernel
    return out, clamped


def line_kernel(truncation: float, cfg: OperatorConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Lags in ``[0, L]`` and their weights times ``e^{-lag}``."""
    if cfg.quad_step >= truncation:
        raise ConfigurationError(
            f"Quadrature step h={cfg.quad_step} must be below the truncation L={truncation}"
        )
    lags, weights = composite_gauss_legendre(0.0, truncation, cfg.quad_step)
    return lags, weights * np.exp(-lags)


def solve_on_line(
    v: BaseLeafFunction, grid, cfg: Optional[OperatorConfig] = None
) -> SolutionProfile:
    """
    Solve ``u + u' = v`` on a line leaf.

    Args:
        v: Right-hand side with certified bound.
        grid: Ascending leaf parameters where ``u`` is wanted.
        cfg: Operator settings; defaults to ``OperatorConfig()``.

    Returns:
        The sampled solution. ``residual_sup`` is filled when the grid has
        at least three points.
    """
    cfg = cfg or OperatorConfig()
    points = as_grid(grid)
    truncation = cfg.truncation_length(v.bound)
    lags, kernel = line_kernel(truncation, cfg)

    values, clamped = _convolve(v, points, lags, kernel)
    profile = SolutionProfile(
        grid=points,
        values=values,
        config=cfg,
        truncation=truncation,
        clamped=clamped,
        label=v.describe(),
    )
    if clamped:
        logger.warning(f"{v.describe()} was clamped outside its interval")
    if points.size >= 3:
        profile = profile.with_residual(ode_residual(profile, v))
    logger.debug(
        f"solve_on_line {v.describe()} on {points.size} points, L={truncation:.6g}, "
        f"{lags.size} nodes"
    )
    return profile


def _resolve_period(v: BaseLeafFunction, period: Optional[float]) -> float:
    if not v.is_periodic:
        raise LeafFunctionTypeError(f"{v.describe()} is not a periodic kind")
    if period is None:
        if v.period is None:
            raise ConfigurationError(f"A period must be given for {v.describe()}")
        return v.period
    if period <= 0 or not math.isfinite(period):
        raise ConfigurationError(f"Period must be positive, got {period}")
    if v.period is not None:
        ratio = period / v.period
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise LeafFunctionTypeError(
                f"Period {period} is not a multiple of the period {v.period} of {v.describe()}"
            )
    return float(period)


def solve_periodic(
    v: BaseLeafFunction,
    theta_grid,
    cfg: Optional[OperatorConfig] = None,
    period: Optional[float] = None,
) -> SolutionProfile:
    """
    Solve ``u + u' = v`` for a periodic ``v`` on a closed leaf.

    Uses ``u(t) = (1 / (1 - e^{-P})) int_0^P e^{-s} v(t - s) ds``.

    Args:
        v: Periodic right-hand side.
        theta_grid: Ascending parameters, usually in ``[0, P)``.
        cfg: Operator settings; only ``quad_step`` matters here.
        period: Period ``P``; defaults to the period of ``v``.

    Returns:
        The sampled periodic solution with its measured periodicity defect.
    """
    cfg = cfg or OperatorConfig()
    resolved = _resolve_period(v, period)
    points = as_grid(theta_grid)

    lags, weights = composite_gauss_legendre(0.0, resolved, cfg.quad_step)
    kernel = weights * np.exp(-lags) / -math.expm1(-resolved)

    values, _ = _convolve(v, points, lags, kernel)
    shifted, _ = _convolve(v, points + resolved, lags, kernel)
    defect = float(np.max(np.abs(shifted - values)))

    profile = SolutionProfile(
        grid=points,
        values=values,
        config=cfg,
        periodicity_defect=defect,
        label=v.describe(),
        metadata={"period": resolved},
    )
    if points.size >= 3:
        profile = profile.with_residual(ode_residual(profile, v))
    logger.debug(f"solve_periodic {v.describe()} P={resolved:.6g}, defect={defect:.3g}")
    return profile


def _common_period(v: BaseLeafFunction, coefficient: BaseLeafFunction) -> Optional[float]:
    if not (v.is_periodic and coefficient.is_periodic):
        return None
    periods = [p for p in (v.period, coefficient.period) if p is not None]
    if not periods:
        return 1.0
    longest = max(periods)
    for p in periods:
        ratio = longest / p
        if abs(ratio - round(ratio)) > 1e-9:
            return None
    return longest


def solve_with_coefficient(
    v: BaseLeafFunction,
    coefficient: BaseLeafFunction,
    grid,
    cfg: Optional[OperatorConfig] = None,
) -> SolutionProfile:
    """
    Solve ``(A + A') U + A U' = v``, i.e. ``U = (1 / (A e^x)) int e^t v dt``.

    When ``v`` and ``A`` share a period ``P`` the profile records
    ``max |U(x + P) - U(x)|`` as its periodicity defect. The stored residual
    is that of ``A U`` against ``v``.

    Args:
        v: Right-hand side.
        coefficient: Positive coefficient ``A``.
        grid: Ascending leaf parameters.
        cfg: Operator settings; ``coefficient_floor`` bounds ``A`` from below.

    Returns:
        The sampled ``U``.
    """
    cfg = cfg or OperatorConfig()
    points = as_grid(grid)
    a_values = coefficient.evaluate_checked(points)
    low = int(np.argmin(a_values))
    if a_values[low] < cfg.coefficient_floor:
        raise SingularCoefficientError(
            f"Coefficient {coefficient.describe()} is {a_values[low]!r} at x={points[low]!r}, "
            f"below the floor {cfg.coefficient_floor}"
        )

    weighted = solve_on_line(v, points, cfg)
    values = weighted.values / a_values

    defect = None
    period = _common_period(v, coefficient)
    if period is not None:
        shifted_points = points + period
        shifted = solve_on_line(v, shifted_points, cfg).values / coefficient(shifted_points)
        defect = float(np.max(np.abs(shifted - values)))
        logger.debug(f"Coefficient solve periodicity defect {defect:.3g} at P={period}")

    return SolutionProfile(
        grid=points,
        values=values,
        config=cfg,
        truncation=weighted.truncation,
        residual_sup=weighted.residual_sup,
        periodicity_defect=defect,
        clamped=weighted.clamped or coefficient.clamps(points),
        label=f"{v.describe()} / {coefficient.describe()}",
        metadata={"coefficient": coefficient.describe()},
    )


def ode_residual(profile: SolutionProfile, v: BaseLeafFunction) -> float:
    """
    Sup over interior grid points of ``|u + u' - v|``.

    Args:
        profile: Sampled solution with at least three points.
        v: The right-hand side it should satisfy.

    Returns:
        The measured residual.
    """
    if len(profile) < 3:
        raise DomainError(f"ode_residual needs at least 3 grid points, got {len(profile)}")
    derivative = interior_derivative(profile.values, profile.grid)
    interior = profile.grid[1:-1]
    residual = profile.values[1:-1] + derivative - v.evaluate_checked(interior)
    return float(np.max(np.abs(residual)))
