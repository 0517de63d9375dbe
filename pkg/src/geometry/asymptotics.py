"""
Leaf solves on the annulus and the matching of spiral solutions to the
boundary circles they wind onto.
"""

import logging
from dataclasses import replace
from typing import Optional

import numpy as np

from core.exceptions import EvaluationError
from geometry.annulus_function import AnnulusFunction
from geometry.spiral import INNER_RADIUS, OUTER_RADIUS, TWO_PI
from solver.line_operator import solve_on_line, solve_periodic
from solver.operator_config import OperatorConfig
from solver.profile import SolutionProfile

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

ENVELOPE_SAMPLES = 257


def spiral_solve(
    v: AnnulusFunction, s: float, theta_grid, cfg: Optional[OperatorConfig] = None
) -> SolutionProfile:
    """Solve ``u + du/dtheta = v`` along the spiral leaf ``s``."""
    profile = solve_on_line(v.spiral_restriction(s), theta_grid, cfg)
    return replace(profile, metadata={"leaf": "spiral", "s": s})


def circle_solve(
    v: AnnulusFunction, radius: float, theta_grid, cfg: Optional[OperatorConfig] = None
) -> SolutionProfile:
    """Solve on the boundary circle of the given radius (1 or 2); 2 pi-periodic."""
    profile = solve_periodic(v.circle_restriction(radius), theta_grid, cfg)
    return replace(profile, metadata={"leaf": "circle", "radius": radius, "period": TWO_PI})


def _gaps(
    v: AnnulusFunction, s: float, thetas: np.ndarray, cfg: OperatorConfig
) -> np.ndarray:
    """Gap at ascending angles that all lie on one side of zero."""
    radius = INNER_RADIUS if thetas[-1] <= 0 else OUTER_RADIUS
    spiral = spiral_solve(v, s, thetas, cfg)
    wrapped, inverse = np.unique(np.mod(thetas, TWO_PI), return_inverse=True)
    circle = solve_periodic(v.circle_restriction(radius), wrapped, cfg)
    circle_values = circle.values[inverse]
    gaps = np.abs(spiral.values - circle_values)
    if not np.all(np.isfinite(gaps)):
        raise EvaluationError(f"Non-finite asymptotic gap on spiral s={s!r}", point=float(thetas[0]))
    return gaps


def asymptotic_gap(
    v: AnnulusFunction, s: float, theta: float, cfg: Optional[OperatorConfig] = None
) -> float:
    """
    Distance between the spiral solution and the boundary-circle solution.

    For ``theta <= 0`` the spiral is compared with the inner circle at the
    same angle, otherwise with the outer circle.

    Args:
        v: Annulus function, continuous up to both circles.
        s: Spiral leaf label.
        theta: Angle along the spiral.
        cfg: Operator settings.

    Returns:
        ``|u(r(theta, s), theta) - u(R, theta mod 2 pi)|`` with ``R`` 1 or 2.
    """
    cfg = cfg or OperatorConfig()
    gap = float(_gaps(v, s, np.array([float(theta)]), cfg)[0])
    logger.debug(f"asymptotic_gap s={s!r} theta={theta!r}: {gap:.3g}")
    return gap


def asymptotic_envelope(
    v: AnnulusFunction,
    s: float,
    theta: float,
    cfg: Optional[OperatorConfig] = None,
    samples: int = ENVELOPE_SAMPLES,
) -> float:
    """
    Largest asymptotic gap over the turn adjacent to ``theta``, away from the origin.

    The pointwise gap oscillates with the angle; its maximum over a full turn
    decreases as the turn moves towards either circle.
    """
    cfg = cfg or OperatorConfig()
    if theta <= 0:
        turn = np.linspace(theta - TWO_PI, theta, samples + 1)[1:]
    else:
        turn = np.linspace(theta, theta + TWO_PI, samples + 1)[:-1]
    envelope = float(np.max(_gaps(v, s, turn, cfg)))
    logger.info(f"asymptotic envelope of {v.describe()} at s={s!r}, theta={theta!r}: {envelope:.3g}")
    return envelope
