"""Composite Gauss–Legendre quadrature on panels of bounded width."""

import logging
import math
from typing import Tuple

import numpy as np

from core.exceptions import ConfigurationError

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

GAUSS_LEGENDRE_ORDER = 5

_REFERENCE_NODES, _REFERENCE_WEIGHTS = np.polynomial.legendre.leggauss(
    GAUSS_LEGENDRE_ORDER
)


def panel_count(length: float, max_width: float) -> int:
    """Number of equal panels of width at most ``max_width`` covering ``length``."""
    if max_width <= 0:
        raise ConfigurationError(f"Panel width must be positive, got {max_width}")
    if length <= 0:
        return 0
    return max(1, math.ceil(length / max_width - 1e-12))


def composite_gauss_legendre(
    a: float, b: float, max_width: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes and weights of the composite 5-point rule on ``[a, b]``.

    Args:
        a: Left end.
        b: Right end, ``b >= a``.
        max_width: Largest admissible panel width.

    Returns:
        Ascending nodes and their weights. Empty arrays when ``a == b``.
    """
    if b < a:
        raise ConfigurationError(f"Quadrature interval reversed: [{a}, {b}]")
    n = panel_count(b - a, max_width)
    if n == 0:
        return np.empty(0), np.empty(0)

    edges = np.linspace(a, b, n + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * _REFERENCE_NODES[None, :]).ravel()
    weights = (half[:, None] * _REFERENCE_WEIGHTS[None, :]).ravel()
    return nodes, weights


def segment_rule(
    breakpoints: np.ndarray, max_width: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Composite rule over every segment between consecutive breakpoints.

    Each segment gets its own panels, so sums per segment are exact rule
    applications on that segment.

    Args:
        breakpoints: Ascending points; segment ``k`` is
            ``[breakpoints[k], breakpoints[k + 1]]``.
        max_width: Largest admissible panel width.

    Returns:
        Nodes, weights and the segment index of every node.
    """
    lengths = np.diff(breakpoints)
    if np.any(lengths < 0):
        raise ConfigurationError("Breakpoints must be ascending")
    counts = np.array([panel_count(length, max_width) for length in lengths], dtype=int)

    panel_segment = np.repeat(np.arange(lengths.size), counts)
    position = np.arange(panel_segment.size) - np.repeat(np.cumsum(counts) - counts, counts)
    safe_counts = np.maximum(counts, 1)
    width = lengths[panel_segment] / safe_counts[panel_segment]
    left = breakpoints[:-1][panel_segment] + position * width

    half = 0.5 * width
    mid = left + half
    nodes = (mid[:, None] + half[:, None] * _REFERENCE_NODES[None, :]).ravel()
    weights = (half[:, None] * _REFERENCE_WEIGHTS[None, :]).ravel()
    segments = np.repeat(panel_segment, GAUSS_LEGENDRE_ORDER)
    return nodes, weights, segments


def mean_value(values_at: np.ndarray) -> np.ndarray:
    """
    Average of a function over ``[0, x]`` from its values at scaled nodes.

    ``values_at`` has the function sampled at ``x * (1 + node) / 2`` for the
    reference nodes along its last axis.
    """
    return 0.5 * values_at @ _REFERENCE_WEIGHTS


def reference_fractions() -> np.ndarray:
    """Reference nodes mapped from ``[-1, 1]`` to ``[0, 1]``."""
    return 0.5 * (1.0 + _REFERENCE_NODES)
