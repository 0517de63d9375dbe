"""
Spiral foliation of the open annulus ``1 < r < 2``.

The leaf with label ``s`` is the spiral ``r(theta, s) = 3/2 + arctan(theta + s) / pi``.
It winds onto the inner circle as ``theta -> -inf`` and onto the outer
circle as ``theta -> +inf``; the two boundary circles are leaves too.
"""

import logging
import math
from typing import NamedTuple, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.exceptions import OutOfAnnulusError

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

INNER_RADIUS = 1.0
OUTER_RADIUS = 2.0
MID_RADIUS = 1.5
TWO_PI = 2.0 * math.pi


class InducedField(NamedTuple):
    """Leaf-tangent field components ``(F, G)`` at a Cartesian point."""

    F: np.ndarray
    G: np.ndarray


def spiral_radius(theta, s=0.0):
    """Radius ``3/2 + arctan(theta + s) / pi`` of the leaf ``s`` at angle ``theta``."""
    return MID_RADIUS + np.arctan(np.add(theta, s)) / math.pi


def spiral_radius_slope(theta, s=0.0):
    """``dr/dtheta = (1 / pi) / (1 + (theta + s)^2)``."""
    tau = np.add(theta, s)
    return (1.0 / math.pi) / (1.0 + tau * tau)


def chart_to_cartesian(theta, s=0.0) -> Tuple[np.ndarray, np.ndarray]:
    r = spiral_radius(theta, s)
    return r * np.cos(theta), r * np.sin(theta)


def cartesian_to_chart(x, y) -> Tuple[np.ndarray, np.ndarray]:
    """
    Chart coordinates ``(theta, s)`` of a point strictly inside the annulus.

    ``theta + s`` is fixed by the radius; ``theta`` is ``atan2(y, x)`` lifted
    by the whole number of turns that puts ``s`` in ``[-pi, pi]``.

    Args:
        x: Cartesian abscissa, scalar or array.
        y: Cartesian ordinate, same shape.

    Returns:
        The angle ``theta`` and the leaf label ``s``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rho = np.hypot(x, y)
    outside = ~((rho > INNER_RADIUS) & (rho < OUTER_RADIUS))
    if np.any(outside):
        bad = float(np.ravel(rho)[np.flatnonzero(np.ravel(outside))[0]])
        raise OutOfAnnulusError(f"Point at radius {bad!r} is not inside the open annulus")

    tau = np.tan(math.pi * (rho - MID_RADIUS))
    phi = np.arctan2(y, x)
    winding = np.round((tau - phi) / TWO_PI)
    theta = phi + TWO_PI * winding
    return theta, tau - theta


def induced_field_at(x, y) -> InducedField:
    """
    Pushforward of ``d/dtheta`` under the chart at a Cartesian point.

    ``F = cos(theta) r' - r sin(theta)`` and ``G = sin(theta) r' + r cos(theta)``.
    """
    theta, s = cartesian_to_chart(x, y)
    r = spiral_radius(theta, s)
    slope = spiral_radius_slope(theta, s)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    return InducedField(F=cos_t * slope - r * sin_t, G=sin_t * slope + r * cos_t)


class SpiralChart(BaseModel):
    """One spiral leaf, identified by its label ``s``."""

    model_config = ConfigDict(frozen=True)

    s: float = Field(default=0.0, ge=-math.pi, le=math.pi)

    def radius(self, theta):
        return spiral_radius(theta, self.s)

    def point(self, theta) -> Tuple[np.ndarray, np.ndarray]:
        return chart_to_cartesian(theta, self.s)

    def tangent(self, theta) -> Tuple[np.ndarray, np.ndarray]:
        """Exact derivative of ``point`` in ``theta``."""
        r = self.radius(theta)
        slope = spiral_radius_slope(theta, self.s)
        return (
            np.cos(theta) * slope - r * np.sin(theta),
            np.sin(theta) * slope + r * np.cos(theta),
        )
