"""
Bounded solutions of ``phi(x) d/dx[x e^{|x|} u] = x e^{|x|} v`` on the line.

``phi`` vanishes only at the origin, where the field ``phi d/dx`` has its
zero. The equation splits into four branches meeting at ``0`` and ``+-1``;
each branch is an explicit weighted integral, evaluated here by cumulative
Gauss–Legendre quadrature between consecutive grid points. Every recursion
multiplies by a factor ``<= 1``, so no exponential of ``|x|`` is ever formed.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from core.exceptions import ConfigurationError, DomainError
from solver.differences import interior_derivative
from solver.leaf_function import BaseLeafFunction
from solver.operator_config import OperatorConfig
from solver.profile import as_grid
from solver.quadrature import mean_value, reference_fractions, segment_rule

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

JUNCTIONS = (-1.0, 0.0, 1.0)
REQUIRED_SPAN = (-2.0, 2.0)
MATCHING_TOLERANCE = 1e-6
# grid points this close to a junction are snapped onto it
_SNAP = 1e-9


class PhiProfile:
    """``phi(x) = 1`` for ``x >= 1``, ``x`` on ``(-1, 1)``, ``-1`` for ``x <= -1``."""

    def __call__(self, x) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), -1.0, 1.0)

    @staticmethod
    def integrating_factor(x) -> np.ndarray:
        """``x e^{|x|}``."""
        x = np.asarray(x, dtype=float)
        return x * np.exp(np.abs(x))


def _frozen(values) -> np.ndarray:
    out = np.array(values, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class BranchProfile:
    """One branch ``u_k`` sampled on its closed interval."""

    name: str
    interval: Tuple[float, float]
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "grid", _frozen(self.grid))
        object.__setattr__(self, "values", _frozen(self.values))

    def at(self, x: float) -> float:
        """Value at a grid point of this branch."""
        index = np.flatnonzero(self.grid == x)
        if index.size == 0:
            raise DomainError(f"{x!r} is not a grid point of branch {self.name}")
        return float(self.values[index[0]])


@dataclass(frozen=True, eq=False)
class PiecewiseSolution:
    """The four branches and their junction gaps."""

    u1: BranchProfile
    u2: BranchProfile
    u3: BranchProfile
    u4: BranchProfile
    junction_gaps: Dict[str, float]
    config: OperatorConfig
    label: str = ""
    residual_sup: Optional[float] = None
    metadata: dict = field(default_factory=dict)

    @property
    def branches(self) -> Tuple[BranchProfile, ...]:
        return (self.u4, self.u3, self.u1, self.u2)

    def merged(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        The solution on the whole grid, ascending.

        Junctions take the value of the branch to their right at ``-1`` and
        of ``u1`` at ``0`` and ``1``.
        """
        pieces = [
            (self.u4.grid[:-1], self.u4.values[:-1]),
            (self.u3.grid[:-1], self.u3.values[:-1]),
            (self.u1.grid, self.u1.values),
            (self.u2.grid[1:], self.u2.values[1:]),
        ]
        grid = np.concatenate([g for g, _ in pieces])
        values = np.concatenate([v for _, v in pieces])
        return grid, values

    @property
    def sup_abs(self) -> float:
        return float(max(np.max(np.abs(b.values)) for b in self.branches))

    def matches(self, tolerance: float = MATCHING_TOLERANCE) -> bool:
        return all(gap <= tolerance for gap in self.junction_gaps.values())


def _snap_junctions(grid: np.ndarray) -> np.ndarray:
    grid = grid.copy()
    for junction in JUNCTIONS:
        near = np.abs(grid - junction) <= _SNAP
        if not np.any(near):
            raise ConfigurationError(f"Grid must contain the junction x={junction:g}")
        grid[near] = junction
    if grid[0] > REQUIRED_SPAN[0] or grid[-1] < REQUIRED_SPAN[1]:
        raise ConfigurationError(
            f"Grid [{grid[0]:g}, {grid[-1]:g}] must span at least [{REQUIRED_SPAN[0]:g}, "
            f"{REQUIRED_SPAN[1]:g}]"
        )
    return as_grid(grid)


def _segment_integrals(
    integrand: Callable[[np.ndarray, np.ndarray], np.ndarray],
    breakpoints: np.ndarray,
    max_width: float,
) -> np.ndarray:
    """
    ``int_{b_k}^{b_{k+1}} integrand(t, k) dt`` for every segment ``k``.

    ``integrand`` receives the nodes and their segment index.
    """
    if breakpoints.size < 2:
        return np.empty(0)
    nodes, weights, segments = segment_rule(breakpoints, max_width)
    contributions = weights * integrand(nodes, segments)
    return np.bincount(segments, weights=contributions, minlength=breakpoints.size - 1)


def _mean_near_zero(
    integrand: Callable[[np.ndarray], np.ndarray], x: np.ndarray
) -> np.ndarray:
    """Mean of ``integrand`` between ``0`` and each ``x``; equals ``integrand(0)`` at ``x = 0``."""
    nodes = x[:, None] * reference_fractions()[None, :]
    return mean_value(integrand(nodes.ravel()).reshape(nodes.shape))


def _branch_u1(v: BaseLeafFunction, grid: np.ndarray, h: float) -> np.ndarray:
    """``u1 = e^{-x} / x int_0^x e^t v``; within one panel of ``0`` the mean-value form is used."""
    pieces = _segment_integrals(lambda t, _: np.exp(t) * v.evaluate_checked(t), grid, h)
    cumulative = np.concatenate([[0.0], np.cumsum(pieces)])
    values = np.empty_like(grid)
    near = grid <= h
    values[near] = np.exp(-grid[near]) * _mean_near_zero(
        lambda t: np.exp(t) * v.evaluate_checked(t), grid[near]
    )
    values[~near] = np.exp(-grid[~near]) * cumulative[~near] / grid[~near]
    return values


def _branch_u3(v: BaseLeafFunction, grid: np.ndarray, h: float) -> np.ndarray:
    """``u3 = e^x / |x| int_x^0 e^{-t} v`` on ``[-1, 0]``."""
    pieces = _segment_integrals(lambda t, _: np.exp(-t) * v.evaluate_checked(t), grid, h)
    from_right = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
    values = np.empty_like(grid)
    near = grid >= -h
    values[near] = np.exp(grid[near]) * _mean_near_zero(
        lambda t: np.exp(-t) * v.evaluate_checked(t), grid[near]
    )
    values[~near] = np.exp(grid[~near]) * from_right[~near] / np.abs(grid[~near])
    return values


def _branch_u2(
    v: BaseLeafFunction, grid: np.ndarray, h: float, u1_at_one: float
) -> np.ndarray:
    """
    ``u2 = (int_1^x t e^{t-x} v dt + u1(1) e^{1-x}) / x`` on ``[1, x_max]``.

    The weighted integral is carried forward with ``F_k = e^{-dx} F_{k-1} + segment``.
    """
    right_ends = grid[1:]
    pieces = _segment_integrals(
        lambda t, seg: t * np.exp(t - right_ends[seg]) * v.evaluate_checked(t), grid, h
    )
    carried = np.zeros_like(grid)
    decay = np.exp(-np.diff(grid))
    for k, piece in enumerate(pieces):
        carried[k + 1] = decay[k] * carried[k] + piece
    return (carried + u1_at_one * np.exp(1.0 - grid)) / grid


def _branch_u4(
    v: BaseLeafFunction, grid: np.ndarray, h: float, u3_at_minus_one: float
) -> np.ndarray:
    """
    ``u4 = (int_x^{-1} t e^{x-t} v dt - u3(-1) e^{x+1}) / x`` on ``[x_min, -1]``.

    This is the branch with ``phi = -1``; the integral is carried leftward from ``-1``.
    """
    left_ends = grid[:-1]
    pieces = _segment_integrals(
        lambda t, seg: t * np.exp(left_ends[seg] - t) * v.evaluate_checked(t), grid, h
    )
    carried = np.zeros_like(grid)
    decay = np.exp(-np.diff(grid))
    for k in range(pieces.size - 1, -1, -1):
        carried[k] = decay[k] * carried[k + 1] + pieces[k]
    return (carried - u3_at_minus_one * np.exp(grid + 1.0)) / grid


def singular_line_solve(
    v: BaseLeafFunction, grid, cfg: Optional[OperatorConfig] = None
) -> PiecewiseSolution:
    """
    Solve ``phi(x) d/dx[x e^{|x|} u] = x e^{|x|} v`` on a grid through ``0`` and ``+-1``.

    Args:
        v: Bounded continuous right-hand side.
        grid: Ascending points spanning at least ``[-2, 2]`` and containing the
            junctions ``-1``, ``0`` and ``1``.
        cfg: Operator settings; ``quad_step`` bounds the panel width.

    Returns:
        The four branches with their junction gaps and residual.
    """
    cfg = cfg or OperatorConfig()
    points = _snap_junctions(as_grid(grid))
    h = cfg.quad_step

    right = points[points >= 1.0]
    middle_right = points[(points >= 0.0) & (points <= 1.0)]
    middle_left = points[(points >= -1.0) & (points <= 0.0)]
    left = points[points <= -1.0]

    u1 = BranchProfile("u1", (0.0, 1.0), middle_right, _branch_u1(v, middle_right, h))
    u3 = BranchProfile("u3", (-1.0, 0.0), middle_left, _branch_u3(v, middle_left, h))
    u2 = BranchProfile(
        "u2", (1.0, float(right[-1])), right, _branch_u2(v, right, h, u1.at(1.0))
    )
    u4 = BranchProfile(
        "u4", (float(left[0]), -1.0), left, _branch_u4(v, left, h, u3.at(-1.0))
    )

    gaps = {
        "u1(0)-u3(0)": abs(u1.at(0.0) - u3.at(0.0)),
        "u1(1)-u2(1)": abs(u1.at(1.0) - u2.at(1.0)),
        "u3(-1)-u4(-1)": abs(u3.at(-1.0) - u4.at(-1.0)),
    }
    solution = PiecewiseSolution(
        u1=u1, u2=u2, u3=u3, u4=u4, junction_gaps=gaps, config=cfg, label=v.describe()
    )
    if not solution.matches():
        logger.warning(f"Junction gaps above {MATCHING_TOLERANCE}: {gaps}")

    try:
        residual = singular_line_residual(solution, v)
    except DomainError as e:
        logger.debug(f"Residual skipped: {e}")
    else:
        solution = replace(solution, residual_sup=residual)
    logger.info(
        f"singular_line_solve {v.describe()} on [{points[0]:g}, {points[-1]:g}]: "
        f"sup|u| {solution.sup_abs:.6g}, max gap {max(gaps.values()):.3g}"
    )
    return solution


def singular_line_residual(
    sol: PiecewiseSolution, v: BaseLeafFunction, exclusion: Optional[float] = None
) -> float:
    """
    Sup of ``|phi [(xu)' + sgn(x) xu] - xv|`` away from the junctions.

    This is the defining equation divided by ``e^{|x|}``. Points within
    ``exclusion`` of ``0`` or ``+-1`` are skipped; the default is the widest
    grid spacing of each branch.

    Args:
        sol: Piecewise solution.
        v: Its right-hand side.
        exclusion: Radius excluded around every junction.

    Returns:
        The largest residual over all branches.
    """
    phi = PhiProfile()
    worst = 0.0
    for branch in sol.branches:
        if branch.grid.size < 5:
            raise DomainError(
                f"Branch {branch.name} needs at least 3 interior points, has {branch.grid.size - 2}"
            )
        x = branch.grid
        xu = x * branch.values
        derivative = interior_derivative(xu, x)
        inner = x[1:-1]
        radius = exclusion if exclusion is not None else float(np.max(np.diff(x)))
        keep = np.min(np.abs(inner[:, None] - np.asarray(JUNCTIONS)[None, :]), axis=1) > radius
        if not np.any(keep):
            continue
        residual = (
            phi(inner) * (derivative + np.sign(inner) * xu[1:-1])
            - inner * v.evaluate_checked(inner)
        )
        worst = max(worst, float(np.max(np.abs(residual[keep]))))
    return worst


class NaiveDemo(BaseModel):
    """One rejected formulation evaluated along a sequence that exposes its growth."""

    model_config = ConfigDict(frozen=True)

    name: str
    formula: str
    points: List[float]
    values: List[float]

    @property
    def divergence(self) -> float:
        return max(abs(value) for value in self.values)

    @property
    def grows(self) -> bool:
        magnitudes = [abs(value) for value in self.values]
        return all(b > a for a, b in zip(magnitudes, magnitudes[1:]))


class NaiveDemoReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    demos: List[NaiveDemo]

    def by_name(self, name: str) -> NaiveDemo:
        for demo in self.demos:
            if demo.name == name:
                return demo
        raise KeyError(name)


def naive_singular_demos() -> NaiveDemoReport:
    """
    Evaluate three unbounded attempts at ``x u' = 1`` style equations for ``v = 1``.

    - ``log``: ``u = ln x``, blowing up as ``x -> 0+``.
    - ``linear``: ``u = x / 2``, growing without bound as ``x -> inf``.
    - ``exponential``: the ``e^x``-weighted attempt ``u = 2 + 1 / (x e^x)``,
      blowing up as ``x -> -inf``.
    """
    towards_zero = [10.0**-k for k in range(1, 7)]
    outwards = [10.0**k for k in range(0, 3)]
    leftwards = [-5.0 * k for k in range(1, 7)]
    demos = [
        NaiveDemo(
            name="log",
            formula="ln x",
            points=towards_zero,
            values=[math.log(x) for x in towards_zero],
        ),
        NaiveDemo(
            name="linear", formula="x / 2", points=outwards, values=[x / 2.0 for x in outwards]
        ),
        NaiveDemo(
            name="exponential",
            formula="2 + 1 / (x e^x)",
            points=leftwards,
            values=[2.0 + 1.0 / (x * math.exp(x)) for x in leftwards],
        ),
    ]
    for demo in demos:
        logger.info(f"naive form {demo.formula}: max |u| {demo.divergence:.6g}")
    return NaiveDemoReport(demos=demos)
