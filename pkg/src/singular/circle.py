"""
Periodicity obstruction for ``sin(theta) d/dtheta[f u] = f v`` on the circle.

Away from ``0`` and ``pi`` the equation integrates to
``f u = int f v / sin``. Near a zero of ``sin`` the integrand behaves like
``residue / distance``, so each arc integral diverges logarithmically unless
``f v`` vanishes there. Integrals near a zero use the substitution
``distance = e^z``, which turns the pole into a bounded integrand.
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.exceptions import ConfigurationError, LeafFunctionTypeError
from solver.leaf_function import BaseLeafFunction
from solver.operator_config import OperatorConfig
from solver.quadrature import composite_gauss_legendre

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi
DEFAULT_CUTOFFS = (1e-2, 1e-3, 1e-4)
ARC_SAMPLES = 65


class CircleWeight(BaseModel):
    """``f(theta) = e^{rate theta} (1 + modulation cos theta)``, so ``f(theta + 2 pi) = C f(theta)``."""

    model_config = ConfigDict(frozen=True)

    rate: float = 0.0
    modulation: float = Field(default=0.0, gt=-1.0, lt=1.0)

    @property
    def multiplier(self) -> float:
        return math.exp(TWO_PI * self.rate)

    def __call__(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return np.exp(self.rate * theta) * (1.0 + self.modulation * np.cos(theta))

    def describe(self) -> str:
        return f"weight:rate={self.rate!r},modulation={self.modulation!r}"


class ObstructionReport(BaseModel):
    """Arc integrals at shrinking cutoffs and what they imply for periodic solutions."""

    model_config = ConfigDict(frozen=True)

    function: str
    weight: CircleWeight
    multiplier: float
    cutoffs: List[float]
    upper: List[float]
    lower: List[float]
    defects: List[float]
    residues: Dict[str, float]
    predicted_slopes: Tuple[float, float]
    fitted_slopes: Tuple[float, float]
    divergent: bool
    absorbable: bool
    upper_arc: List[Tuple[float, float]]
    lower_arc: List[Tuple[float, float]]

    @property
    def defect(self) -> float:
        """Defect at the smallest cutoff."""
        return self.defects[int(np.argmin(self.cutoffs))]

    @property
    def slope_errors(self) -> Tuple[float, float]:
        """Relative deviation of the fitted slopes from the predicted ones."""
        errors = []
        for fitted, predicted in zip(self.fitted_slopes, self.predicted_slopes):
            errors.append(abs(fitted - predicted) / abs(predicted) if predicted else abs(fitted))
        return tuple(errors)


def _near_zero(
    g: Callable[[np.ndarray], np.ndarray],
    singular: float,
    side: float,
    near: float,
    far: float,
    h: float,
) -> float:
    """``int_near^far g(singular + side * d) dd`` with ``d = e^z``."""
    if near == far:
        return 0.0
    z, weights = composite_gauss_legendre(math.log(near), math.log(far), h)
    distance = np.exp(z)
    return float(weights @ (g(singular + side * distance) * distance))


def _check_periodic(v: BaseLeafFunction) -> None:
    if not v.is_periodic:
        raise LeafFunctionTypeError(f"{v.describe()} is not a periodic kind")
    if v.period is not None:
        ratio = TWO_PI / v.period
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise LeafFunctionTypeError(
                f"{v.describe()} has period {v.period}, which does not divide 2 pi"
            )


def _arc_samples(
    g: Callable[[np.ndarray], np.ndarray],
    weight: CircleWeight,
    start: float,
    cutoff: float,
    h: float,
) -> List[Tuple[float, float]]:
    """``u = (1 / f) int_{start + pi/2}^theta f v / sin`` on the arc ``(start, start + pi)``."""
    middle = start + HALF_PI
    samples = []
    for theta in np.linspace(start + cutoff, start + math.pi - cutoff, ARC_SAMPLES):
        if theta <= middle:
            integral = -_near_zero(g, start, 1.0, theta - start, HALF_PI, h)
        else:
            integral = _near_zero(g, start + math.pi, -1.0, start + math.pi - theta, HALF_PI, h)
        samples.append((float(theta), integral / float(weight(theta))))
    return samples


def circle_obstruction(
    v: BaseLeafFunction,
    weight: Optional[CircleWeight] = None,
    cutoffs: Sequence[float] = DEFAULT_CUTOFFS,
    cfg: Optional[OperatorConfig] = None,
    residue_tolerance: float = 1e-12,
) -> ObstructionReport:
    """
    Measure why ``sin(theta) d/dtheta[f u] = f v`` has no periodic solution.

    The arcs ``(eta, pi - eta)`` and ``(pi + eta, 2 pi - eta)`` are integrated
    for every cutoff ``eta``. If ``f v`` is nonzero at one of ``0, pi, 2 pi``
    the integrals diverge like ``residue * ln(eta)`` and the defect is the
    total size of the arc pieces. Otherwise they converge; with ``C = 1`` the
    defect is the net change ``|upper + lower|`` over a full turn, and with
    ``C != 1`` the change is absorbed by an integration constant.

    Args:
        v: 2 pi-periodic right-hand side.
        weight: Integrating weight ``f``; defaults to ``f = 1``.
        cutoffs: At least two distinct cutoffs in ``(0, pi/2)``.
        cfg: Operator settings; ``quad_step`` bounds the panel width in ``z``.
        residue_tolerance: Residues below this count as zero.

    Returns:
        The obstruction report.
    """
    _check_periodic(v)
    weight = weight or CircleWeight()
    cfg = cfg or OperatorConfig()
    cutoffs = [float(eta) for eta in cutoffs]
    if len(set(cutoffs)) < 2 or not all(0.0 < eta < HALF_PI for eta in cutoffs):
        raise ConfigurationError(f"Need at least two distinct cutoffs in (0, pi/2), got {cutoffs}")
    h = cfg.quad_step

    def g(theta: np.ndarray) -> np.ndarray:
        return weight(theta) * v.evaluate_checked(theta) / np.sin(theta)

    def fv(theta: float) -> float:
        return float(weight(theta) * v.evaluate_checked(np.array([theta]))[0])

    residues = {"0": fv(0.0), "pi": fv(math.pi), "2pi": fv(TWO_PI)}
    scale = max(1.0, v.bound)
    divergent = any(abs(r) > residue_tolerance * scale for r in residues.values())
    multiplier = weight.multiplier
    absorbable = not divergent and abs(multiplier - 1.0) > 1e-12

    upper, lower, defects = [], [], []
    for eta in cutoffs:
        pieces = (
            _near_zero(g, 0.0, 1.0, eta, HALF_PI, h),
            _near_zero(g, math.pi, -1.0, eta, HALF_PI, h),
            _near_zero(g, math.pi, 1.0, eta, HALF_PI, h),
            _near_zero(g, TWO_PI, -1.0, eta, HALF_PI, h),
        )
        upper.append(pieces[0] + pieces[1])
        lower.append(pieces[2] + pieces[3])
        if divergent:
            defects.append(sum(abs(p) for p in pieces))
        elif absorbable:
            defects.append(0.0)
        else:
            defects.append(abs(upper[-1] + lower[-1]))

    logs = np.log(cutoffs)
    predicted = (
        -(residues["0"] + residues["pi"]),
        residues["pi"] + residues["2pi"],
    )
    fitted = (
        float(np.polyfit(logs, upper, 1)[0]),
        float(np.polyfit(logs, lower, 1)[0]),
    )

    smallest = min(cutoffs)
    report = ObstructionReport(
        function=v.describe(),
        weight=weight,
        multiplier=multiplier,
        cutoffs=cutoffs,
        upper=upper,
        lower=lower,
        defects=defects,
        residues=residues,
        predicted_slopes=predicted,
        fitted_slopes=fitted,
        divergent=divergent,
        absorbable=absorbable,
        upper_arc=_arc_samples(g, weight, 0.0, smallest, h),
        lower_arc=_arc_samples(g, weight, math.pi, smallest, h),
    )
    logger.info(
        f"circle_obstruction {v.describe()} with {weight.describe()}: "
        f"divergent={divergent}, defect {report.defect:.6g}"
    )
    return report
