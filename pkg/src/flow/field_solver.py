"""
Solution of ``U + XU = V`` for a general nonvanishing field ``X``::

    U(x) = int_{-inf}^0 e^w V(Phi(x, w)) dw

cut at depth ``L`` and evaluated with the same Gauss–Legendre kernel as the
line operator, plus the derivative and smoothness checks that go with it.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from core.exceptions import ConfigurationError
from flow.flow_map import FlowMap
from flow.point_function import BasePointFunction
from solver.line_operator import line_kernel
from solver.operator_config import OperatorConfig

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

DEFAULT_FD_STEP = 1e-4
DEFAULT_REFINEMENT_STEPS = (1e-3, 5e-4)
MAX_SMOOTHNESS_ORDER = 3

# discrepancies below this are treated as exact agreement
_EXACT = 1e-13


def _kernel(
    V: BasePointFunction, flow_map: FlowMap, cfg: OperatorConfig
) -> Tuple[float, np.ndarray, np.ndarray]:
    bound = V.bound_on(flow_map.field.region)
    truncation = cfg.truncation_length(bound)
    lags, kernel = line_kernel(truncation, cfg)
    return truncation, lags, kernel


def _check_dimension(V: BasePointFunction, flow_map: FlowMap) -> None:
    if V.dimension != flow_map.dimension:
        raise ConfigurationError(
            f"{V.describe()} has dimension {V.dimension}, the flow {flow_map.dimension}"
        )


def solve_field_batch(
    V: BasePointFunction, points, flow_map: FlowMap, cfg: Optional[OperatorConfig] = None
) -> np.ndarray:
    """``U`` at every row of ``points``; trajectories are integrated together."""
    cfg = cfg or OperatorConfig()
    _check_dimension(V, flow_map)
    _, lags, kernel = _kernel(V, flow_map, cfg)
    trajectories = flow_map.sample_trajectories(points, -lags)
    return kernel @ V.evaluate_checked(trajectories)


def solve_field(
    V: BasePointFunction, x, flow_map: FlowMap, cfg: Optional[OperatorConfig] = None
) -> float:
    """
    Evaluate ``U(x) = int_{-L}^0 e^w V(Phi(x, w)) dw``.

    Args:
        V: Bounded point function; its bound over the working region sets ``L``.
        x: Point in the working region.
        flow_map: Flow of the foliating field.
        cfg: Operator settings.

    Returns:
        The value ``U(x)``.

    Raises:
        FlowEscapeError: The backward trajectory left the working region.
        EvaluationError: ``V`` was not finite along the trajectory.
    """
    value = float(solve_field_batch(V, np.atleast_2d(x), flow_map, cfg)[0])
    logger.debug(f"solve_field {V.describe()} at {np.ravel(x).tolist()}: {value!r}")
    return value


def _inner_derivatives(
    V: BasePointFunction,
    points: np.ndarray,
    axis: int,
    flow_map: FlowMap,
    cfg: OperatorConfig,
    fd_step: float,
) -> np.ndarray:
    """``int e^w grad V(Phi(x, w)) . dPhi/dx_axis dw`` for every row of ``points``."""
    if not 0 <= axis < flow_map.dimension:
        raise ConfigurationError(f"Axis {axis} outside dimension {flow_map.dimension}")
    if fd_step <= 0:
        raise ConfigurationError(f"Finite-difference step must be positive, got {fd_step}")
    _, lags, kernel = _kernel(V, flow_map, cfg)
    shift = np.zeros(flow_map.dimension)
    shift[axis] = fd_step
    m = points.shape[0]
    stacked = np.concatenate([points, points + shift, points - shift])
    trajectories = flow_map.sample_trajectories(stacked, -lags)
    centre = trajectories[:, :m]
    jacobian_column = (trajectories[:, m : 2 * m] - trajectories[:, 2 * m :]) / (2.0 * fd_step)
    inner = np.sum(V.gradient(centre) * jacobian_column, axis=-1)
    return kernel @ inner


def solve_field_derivative(
    V: BasePointFunction,
    x,
    axis: int,
    flow_map: FlowMap,
    cfg: Optional[OperatorConfig] = None,
    fd_step: float = DEFAULT_FD_STEP,
) -> float:
    """
    ``dU/dx_axis`` by differentiating under the integral.

    The flow Jacobian column comes from central differences of the flow with
    step ``fd_step``; the gradient of ``V`` is exact.
    """
    cfg = cfg or OperatorConfig()
    _check_dimension(V, flow_map)
    return float(_inner_derivatives(V, np.atleast_2d(x), axis, flow_map, cfg, fd_step)[0])


class OrderAgreement(BaseModel):
    """Agreement of one derivative order at two refinement steps."""

    model_config = ConfigDict(frozen=True)

    order: int
    steps: Tuple[float, float]
    under_integral: Tuple[float, float]
    finite_difference: Tuple[float, float]
    discrepancies: Tuple[float, float]
    convergence_order: Optional[float] = None
    exact: bool = False
    noisy: bool = False

    @property
    def max_discrepancy(self) -> float:
        return max(self.discrepancies)


class SmoothnessReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    function: str
    field: str
    point: List[float]
    axis: int
    orders: List[OrderAgreement]

    @property
    def max_discrepancy(self) -> float:
        return max((o.max_discrepancy for o in self.orders), default=0.0)

    @property
    def noisy_orders(self) -> List[int]:
        return [o.order for o in self.orders if o.noisy]


def _outer_difference(values: dict, order: int, h: float) -> float:
    """``order``-th central difference of ``U`` from values keyed by multiples of ``h``."""
    if order == 1:
        return (values[1] - values[-1]) / (2.0 * h)
    if order == 2:
        return (values[1] - 2.0 * values[0] + values[-1]) / (h * h)
    return (values[2] - 2.0 * values[1] + 2.0 * values[-1] - values[-2]) / (2.0 * h**3)


def _under_integral(gradients: dict, order: int, h: float) -> float:
    """Order-1 value under the integral, differenced ``order - 1`` more times."""
    if order == 1:
        return gradients[0]
    if order == 2:
        return (gradients[1] - gradients[-1]) / (2.0 * h)
    return (gradients[1] - 2.0 * gradients[0] + gradients[-1]) / (h * h)


def smoothness_order_check(
    V: BasePointFunction,
    x,
    max_order: int,
    flow_map: FlowMap,
    cfg: Optional[OperatorConfig] = None,
    axis: int = 0,
    steps: Sequence[float] = DEFAULT_REFINEMENT_STEPS,
    fd_step: float = DEFAULT_FD_STEP,
) -> SmoothnessReport:
    """
    Compare derivatives under the integral with finite differences of ``U``.

    Order 1 uses the chain rule under the integral; orders 2 and 3 difference
    that first derivative once or twice more. Each is compared with the
    matching central difference of ``U`` at two steps; the Richardson slope
    ``log(d1 / d2) / log(h1 / h2)`` estimates the convergence order. A
    discrepancy that does not shrink under refinement is flagged as noisy.

    Args:
        V: Point function with gradient.
        x: Base point.
        max_order: Highest order checked, at most 3.
        flow_map: Flow of the foliating field.
        cfg: Operator settings.
        axis: Coordinate direction of every derivative.
        steps: Coarse and fine finite-difference steps.
        fd_step: Step of the flow Jacobian inside the order-1 derivative.

    Returns:
        Per-order agreement report.
    """
    cfg = cfg or OperatorConfig()
    _check_dimension(V, flow_map)
    if not 1 <= max_order <= MAX_SMOOTHNESS_ORDER:
        raise ConfigurationError(f"max_order must be in 1..{MAX_SMOOTHNESS_ORDER}, got {max_order}")
    if len(steps) != 2 or not steps[0] > steps[1] > 0:
        raise ConfigurationError(f"Need two decreasing positive steps, got {tuple(steps)}")

    base = np.ravel(np.asarray(x, dtype=float))
    unit = np.zeros(flow_map.dimension)
    unit[axis] = 1.0
    multiples = (-2, -1, 0, 1, 2)

    samples = {}
    for h in steps:
        points = np.stack([base + k * h * unit for k in multiples])
        u_values = solve_field_batch(V, points, flow_map, cfg)
        g_values = _inner_derivatives(V, points[1:4], axis, flow_map, cfg, fd_step)
        samples[h] = (
            dict(zip(multiples, u_values)),
            dict(zip((-1, 0, 1), g_values)),
        )

    orders = []
    for order in range(1, max_order + 1):
        under = tuple(_under_integral(samples[h][1], order, h) for h in steps)
        outer = tuple(_outer_difference(samples[h][0], order, h) for h in steps)
        d1, d2 = (abs(a - b) for a, b in zip(under, outer))
        exact = max(d1, d2) <= _EXACT
        convergence = None
        if not exact and d1 > 0 and d2 > 0:
            convergence = math.log(d1 / d2) / math.log(steps[0] / steps[1])
        noisy = not exact and d2 >= d1
        if noisy:
            logger.warning(
                f"Order {order} discrepancy did not shrink under refinement: {d1:.3g} -> {d2:.3g}"
            )
        orders.append(
            OrderAgreement(
                order=order,
                steps=tuple(steps),
                under_integral=under,
                finite_difference=outer,
                discrepancies=(d1, d2),
                convergence_order=convergence,
                exact=exact,
                noisy=noisy,
            )
        )

    report = SmoothnessReport(
        function=V.describe(),
        field=flow_map.field.describe(),
        point=base.tolist(),
        axis=axis,
        orders=orders,
    )
    logger.info(
        f"smoothness check {V.describe()} up to order {max_order}: "
        f"max discrepancy {report.max_discrepancy:.3g}"
    )
    return report


def field_residual(
    V: BasePointFunction,
    x,
    flow_map: FlowMap,
    cfg: Optional[OperatorConfig] = None,
    h: float = 1e-3,
) -> float:
    """``|(U(Phi(x, h)) - U(Phi(x, -h))) / 2h + U(x) - V(x)|``, the directional form of ``U + XU = V``."""
    cfg = cfg or OperatorConfig()
    _check_dimension(V, flow_map)
    base = np.atleast_2d(np.asarray(x, dtype=float))
    forward = flow_map.flow_batch(base, h)
    backward = flow_map.flow_batch(base, -h)
    u_plus, u_minus, u_here = solve_field_batch(
        V, np.concatenate([forward, backward, base]), flow_map, cfg
    )
    residual = abs((u_plus - u_minus) / (2.0 * h) + u_here - float(V.evaluate_checked(base)[0]))
    logger.debug(f"field residual of {V.describe()} at {base[0].tolist()}: {residual:.3g}")
    return residual


class PairContinuity(BaseModel):
    model_config = ConfigDict(frozen=True)

    first: List[float]
    second: List[float]
    distance: float
    difference: float
    lipschitz: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.difference <= self.bound


class ContinuityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    truncation: float
    tail: float
    pairs: List[PairContinuity]

    @property
    def all_hold(self) -> bool:
        return all(p.holds for p in self.pairs)


def continuity_check(
    V: BasePointFunction,
    pairs: Sequence[Tuple[Sequence[float], Sequence[float]]],
    flow_map: FlowMap,
    cfg: Optional[OperatorConfig] = None,
) -> ContinuityReport:
    """
    Check ``|U(x) - U(x')| <= 2 M e^{-L} + Lip |x - x'|`` on point pairs.

    ``Lip`` is measured per pair as the largest ``|V(Phi(x, w)) - V(Phi(x', w))| / |x - x'|``
    over the quadrature nodes ``w`` in ``[-L, 0]``.
    """
    cfg = cfg or OperatorConfig()
    _check_dimension(V, flow_map)
    truncation, lags, kernel = _kernel(V, flow_map, cfg)
    tail = 2.0 * V.bound_on(flow_map.field.region) * math.exp(-truncation)

    results = []
    for first, second in pairs:
        points = np.array([first, second], dtype=float)
        distance = float(np.linalg.norm(points[0] - points[1]))
        if distance == 0:
            raise ConfigurationError(f"Continuity pair has coincident points {points[0].tolist()}")
        values = V.evaluate_checked(flow_map.sample_trajectories(points, -lags))
        lipschitz = float(np.max(np.abs(values[:, 0] - values[:, 1]))) / distance
        difference = abs(float(kernel @ (values[:, 0] - values[:, 1])))
        results.append(
            PairContinuity(
                first=points[0].tolist(),
                second=points[1].tolist(),
                distance=distance,
                difference=difference,
                lipschitz=lipschitz,
                bound=tail + lipschitz * distance,
            )
        )
    report = ContinuityReport(truncation=truncation, tail=tail, pairs=results)
    if not report.all_hold:
        logger.warning(f"Continuity bound failed on {sum(not p.holds for p in results)} pair(s)")
    return report
