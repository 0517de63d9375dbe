"""
Gluing of box-local solutions into global sections.

In a box the trivialized unknown ``u~ = u e^{-t}`` satisfies the damped
equation ``u~ + du~/dt = v~``, so each box is solved with the line or
periodic operator in its own frame. Compatible data make the box solutions
agree on overlaps; what is left is floating-point and quadrature noise.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from bundle.cover import Box, BundleCover, CocycleReport, verify_cocycle
from bundle.cover_factory import CoverFactory
from core.exceptions import (
    ConfigurationError,
    CoverStructureError,
    IncompatibleDataError,
    LeafFunctionTypeError,
)
from geometry.annulus_function import AnnulusFunction
from geometry.asymptotics import asymptotic_gap
from geometry.spiral import TWO_PI
from solver.leaf_function import BaseLeafFunction, LeafRestriction
from solver.line_operator import solve_on_line, solve_periodic
from solver.operator_config import OperatorConfig
from solver.profile import SolutionProfile, as_grid

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

BOX_SAMPLES = 201
OVERLAP_SAMPLES = 33
DATA_TOLERANCE = 1e-9
TRANSITION_TOLERANCE = 1e-9


def _read_only(values) -> np.ndarray:
    out = np.array(values, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class BoxSection:
    """Trivialized solution on one box; ``profile.grid`` holds the local parameters."""

    box: Box
    base_grid: np.ndarray
    profile: SolutionProfile

    def __post_init__(self):
        object.__setattr__(self, "base_grid", _read_only(self.base_grid))

    @property
    def local_grid(self) -> np.ndarray:
        return self.profile.grid

    @property
    def trivialized(self) -> np.ndarray:
        return self.profile.values

    def frame_values(self) -> np.ndarray:
        """Fiber values ``u = u~ e^t`` in the box frame."""
        return self.profile.values * np.exp(self.local_grid)

    def trivialize(self, frame_values) -> np.ndarray:
        """Inverse of ``frame_values``."""
        return np.asarray(frame_values, dtype=float) * np.exp(-self.local_grid)


class OverlapReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    i: str
    j: str
    transition: float
    expected_transition: float
    samples: int
    data_mismatch: float
    mismatch: float
    fiber_deviation: float


@dataclass(frozen=True, eq=False)
class GluedSection:
    """Box sections, the overlap mismatch table and the section on the base grid."""

    cover: BundleCover
    boxes: Tuple[BoxSection, ...]
    overlaps: Tuple[OverlapReport, ...]
    cocycle: CocycleReport
    base_grid: np.ndarray
    values: np.ndarray
    config: OperatorConfig
    periodicity_defect: Optional[float] = None
    label: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "base_grid", _read_only(self.base_grid))
        object.__setattr__(self, "values", _read_only(self.values))

    @property
    def max_mismatch(self) -> float:
        return max((o.mismatch for o in self.overlaps), default=0.0)

    @property
    def max_fiber_deviation(self) -> float:
        return max((o.fiber_deviation for o in self.overlaps), default=0.0)

    @property
    def residual_sup(self) -> Optional[float]:
        residuals = [b.profile.residual_sup for b in self.boxes if b.profile.residual_sup is not None]
        return max(residuals) if residuals else None

    def section(self, box_id: str) -> BoxSection:
        for box_section in self.boxes:
            if box_section.box.id == box_id:
                return box_section
        raise CoverStructureError(f"Section has no box '{box_id}'")


def trivialized_data(cover: BundleCover, v: BaseLeafFunction) -> Dict[str, BaseLeafFunction]:
    """Per-box data ``t -> v(t - offset)`` for a function of the base coordinate."""
    return {box.id: v.shifted(box.offset) for box in cover.boxes}


def _glued_function(
    cover: BundleCover, local_v: Mapping[str, BaseLeafFunction]
) -> Callable[[np.ndarray], np.ndarray]:
    """
    Data as a function of the base coordinate.

    A point is served by the box that contains it, or by the nearest box
    outside a non-periodic cover.
    """
    boxes = cover.boxes
    shifts = cover._shifts()

    def glued(b: np.ndarray) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        flat = b.ravel()
        if cover.period is not None:
            anchor = boxes[0].start
            flat = anchor + np.mod(flat - anchor, cover.period)
        best = np.full(flat.shape, np.inf)
        owner = np.zeros(flat.shape, dtype=int)
        moved = flat.copy()
        for k, box in enumerate(boxes):
            for shift in shifts:
                candidate = flat + shift
                distance = np.maximum(np.maximum(box.start - candidate, candidate - box.end), 0.0)
                better = distance < best
                best[better] = distance[better]
                owner[better] = k
                moved[better] = candidate[better]
        out = np.empty(flat.shape)
        for k, box in enumerate(boxes):
            mask = owner == k
            if np.any(mask):
                out[mask] = local_v[box.id](box.local(moved[mask]))
        return out.reshape(b.shape)

    return glued


def _box_data(
    cover: BundleCover, box: Box, glued: Callable[[np.ndarray], np.ndarray], bound: float
) -> LeafRestriction:
    """Glued data in the frame of ``box``."""
    offset = box.offset
    return LeafRestriction(
        lambda t: glued(t - offset),
        bound=bound,
        period=cover.period,
        label=f"{cover.name}[{box.id}]",
        domain=(box.start + offset - 50.0, box.end + offset + 50.0),
    )


def _solve(cover: BundleCover, data: LeafRestriction, points, cfg: OperatorConfig) -> SolutionProfile:
    if cover.period is not None:
        return solve_periodic(data, points, cfg, period=cover.period)
    return solve_on_line(data, points, cfg)


def _owner(cover: BundleCover, b: float) -> Optional[Tuple[int, float]]:
    for k, box in enumerate(cover.boxes):
        if box.contains(b):
            return k, b
    for k, box in enumerate(cover.boxes):
        rep = cover.representative(b, box)
        if rep is not None:
            return k, rep
    return None


def _box_grids(cover: BundleCover, base_grid: Optional[np.ndarray], samples: int) -> Tuple[np.ndarray, ...]:
    grids = []
    for k, box in enumerate(cover.boxes):
        if base_grid is None:
            points = [
                p for p in np.linspace(box.start, box.end, samples)
                if _owner(cover, float(p))[0] == k
            ]
        else:
            points = [
                rep for rep in (cover.representative(float(p), box) for p in base_grid)
                if rep is not None
            ]
        grids.append(np.unique(points) if points else np.linspace(box.start, box.end, samples))
    return tuple(grids)


def _check_data(cover: BundleCover, local_v: Mapping[str, BaseLeafFunction], bound: float) -> None:
    missing = [box.id for box in cover.boxes if box.id not in local_v]
    if missing:
        raise CoverStructureError(f"No local data for box(es) {', '.join(missing)} of {cover.name}")

    for overlap in cover.overlaps:
        expected = cover.expected_transition(overlap)
        if abs(overlap.transition - expected) > TRANSITION_TOLERANCE * max(1.0, expected):
            raise CoverStructureError(
                f"Overlap {overlap.name} declares C={overlap.transition!r} but the box offsets "
                f"imply {expected!r}"
            )
        first, second = cover.box(overlap.i), cover.box(overlap.j)
        b = np.linspace(overlap.start, overlap.end, OVERLAP_SAMPLES)
        shift = cover.shift_to(overlap)
        left = local_v[first.id].evaluate_checked(first.local(b))
        right = local_v[second.id].evaluate_checked(second.local(b + shift))
        gap = float(np.max(np.abs(left - right)))
        if gap > DATA_TOLERANCE * max(1.0, bound):
            raise IncompatibleDataError(
                f"Local data disagree by {gap:.3g} on overlap {overlap.name}", overlap=overlap.name
            )


def glue_general(
    cover: BundleCover,
    local_v: Mapping[str, BaseLeafFunction],
    cfg: Optional[OperatorConfig] = None,
    base_grid=None,
    samples: int = BOX_SAMPLES,
) -> GluedSection:
    """
    Solve the trivialized equation on every box and glue the results.

    Args:
        cover: Cover with consistent transition constants.
        local_v: Trivialized data ``v~_i`` per box id, as functions of the
            box's local parameter.
        cfg: Operator settings.
        base_grid: Base coordinates where the glued section is wanted.
            Every box also solves at the points that fall inside it.
        samples: Points per box when ``base_grid`` is omitted.

    Returns:
        The glued section with its overlap mismatch table.

    Raises:
        CoverStructureError: The cover fails its cocycle conditions, lacks
            data for a box, or a constant disagrees with the box offsets.
        IncompatibleDataError: The local data differ on an overlap.
    """
    cfg = cfg or OperatorConfig()
    cocycle = verify_cocycle(cover)
    if not cocycle.consistent:
        raise CoverStructureError(
            f"Cover {cover.name} fails its cocycle conditions: {'; '.join(cocycle.failures)}"
        )
    bound = max((local_v[box.id].bound for box in cover.boxes if box.id in local_v), default=0.0)
    _check_data(cover, local_v, bound)

    grid = None if base_grid is None else as_grid(base_grid)
    glued = _glued_function(cover, local_v)
    frames = {box.id: _box_data(cover, box, glued, bound) for box in cover.boxes}

    sections = []
    for box, box_grid in zip(cover.boxes, _box_grids(cover, grid, samples)):
        profile = _solve(cover, frames[box.id], box.local(box_grid), cfg)
        sections.append(BoxSection(box=box, base_grid=box_grid, profile=profile))

    overlaps = []
    for overlap in cover.overlaps:
        first, second = cover.box(overlap.i), cover.box(overlap.j)
        b = np.linspace(overlap.start, overlap.end, OVERLAP_SAMPLES)
        t_i = first.local(b)
        t_j = second.local(b + cover.shift_to(overlap))
        u_i = _solve(cover, frames[first.id], t_i, cfg).values
        u_j = _solve(cover, frames[second.id], t_j, cfg).values
        # u_j - C u_i over u_j, divided through by e^{t_j}
        numerator = np.abs(u_j - overlap.transition * np.exp(t_i - t_j) * u_i)
        denominator = np.abs(u_j)
        relative = np.where(denominator > 0.0, numerator / np.where(denominator > 0.0, denominator, 1.0), numerator)
        overlaps.append(
            OverlapReport(
                name=overlap.name,
                i=overlap.i,
                j=overlap.j,
                transition=overlap.transition,
                expected_transition=cover.expected_transition(overlap),
                samples=OVERLAP_SAMPLES,
                data_mismatch=float(np.max(np.abs(
                    local_v[first.id](t_i) - local_v[second.id](t_j)
                ))),
                mismatch=float(np.max(np.abs(u_i - u_j))),
                fiber_deviation=float(np.max(relative)),
            )
        )

    if grid is None:
        grid = np.unique(np.concatenate([s.base_grid for s in sections]))
    values = np.empty(grid.size)
    for n, b in enumerate(grid):
        owned = _owner(cover, float(b))
        if owned is None:
            raise ConfigurationError(f"Base point {float(b)!r} lies in no box of {cover.name}")
        k, rep = owned
        section = sections[k]
        index = min(int(np.searchsorted(section.base_grid, rep)), section.base_grid.size - 1)
        if index > 0 and abs(section.base_grid[index - 1] - rep) < abs(section.base_grid[index] - rep):
            index -= 1
        values[n] = section.trivialized[index]

    defect = None
    if cover.period is not None:
        defect = max(s.profile.periodicity_defect or 0.0 for s in sections)

    glued_section = GluedSection(
        cover=cover,
        boxes=tuple(sections),
        overlaps=tuple(overlaps),
        cocycle=cocycle,
        base_grid=grid,
        values=values,
        config=cfg,
        periodicity_defect=defect,
        label=next(iter(local_v.values())).describe() if len(local_v) == 1 else cover.name,
    )
    logger.info(
        f"Glued {cover.name} over {len(sections)} box(es): max mismatch "
        f"{glued_section.max_mismatch:.3g}, fiber deviation {glued_section.max_fiber_deviation:.3g}"
    )
    return glued_section


def circle_bundle_solve(
    v: BaseLeafFunction, cfg: Optional[OperatorConfig] = None, base_grid=None
) -> GluedSection:
    """
    Glued section of the circle bundle for periodic data ``v~``.

    Args:
        v: Trivialized data, periodic with a period dividing ``2 pi``.
        cfg: Operator settings.
        base_grid: Angles where the section is wanted.

    Returns:
        The glued section over the upper and lower arcs.
    """
    if not v.is_periodic:
        raise LeafFunctionTypeError(f"{v.describe()} is not a periodic kind")
    if v.period is not None:
        ratio = TWO_PI / v.period
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise LeafFunctionTypeError(f"{v.describe()} has period {v.period}, which does not divide 2 pi")
    cover = CoverFactory.circle()
    section = glue_general(cover, trivialized_data(cover, v), cfg, base_grid)
    return replace(section, metadata={"function": v.describe()})


class LeafContinuity(BaseModel):
    model_config = ConfigDict(frozen=True)

    first: float
    second: float
    delta: float
    lipschitz: float


@dataclass(frozen=True, eq=False)
class AnnulusBundleReport:
    function: str
    theta_grid: np.ndarray
    leaves: Dict[float, GluedSection]
    inner_circle: GluedSection
    outer_circle: GluedSection
    continuity: Tuple[LeafContinuity, ...]
    inner_gaps: Dict[float, float]
    outer_gaps: Dict[float, float]

    def __post_init__(self):
        object.__setattr__(self, "theta_grid", _read_only(self.theta_grid))

    @property
    def max_mismatch(self) -> float:
        sections = [*self.leaves.values(), self.inner_circle, self.outer_circle]
        return max(s.max_mismatch for s in sections)

    @property
    def max_gap(self) -> float:
        return max([*self.inner_gaps.values(), *self.outer_gaps.values()], default=0.0)


def annulus_bundle_solve(
    v: AnnulusFunction,
    s_samples: Sequence[float],
    theta_grid,
    cfg: Optional[OperatorConfig] = None,
) -> AnnulusBundleReport:
    """
    Trivialized solves on sampled spiral leaves and both boundary circles.

    Each spiral is covered by a chain of half-turn boxes; the circles use
    the two-arc cover. Neighbouring leaves are compared on ``theta_grid``
    and the spirals are matched to the circles at the ends of the grid.

    Args:
        v: Annulus catalog function.
        s_samples: Spiral labels.
        theta_grid: Ascending angles along each spiral.
        cfg: Operator settings.

    Returns:
        The per-leaf sections, continuity deltas and asymptotic gaps.
    """
    cfg = cfg or OperatorConfig()
    thetas = as_grid(theta_grid)
    labels = sorted({float(s) for s in s_samples})
    if not labels or not all(math.isfinite(s) for s in labels):
        raise ConfigurationError(f"Need at least one finite spiral label, got {list(s_samples)}")

    cover = CoverFactory.spiral_chain(float(thetas[0]), float(thetas[-1]))
    leaves = {}
    for s in labels:
        restriction = v.spiral_restriction(s)
        section = glue_general(cover, trivialized_data(cover, restriction), cfg, thetas)
        leaves[s] = replace(section, metadata={"leaf": "spiral", "s": s})

    wrapped = np.unique(np.mod(thetas, TWO_PI))
    circles = []
    for radius in (1.0, 2.0):
        circle_cover = CoverFactory.annulus()
        restriction = v.circle_restriction(radius)
        section = glue_general(circle_cover, trivialized_data(circle_cover, restriction), cfg, wrapped)
        circles.append(replace(section, metadata={"leaf": "circle", "radius": radius}))

    continuity = []
    for first, second in zip(labels, labels[1:]):
        delta = float(np.max(np.abs(leaves[first].values - leaves[second].values)))
        continuity.append(
            LeafContinuity(first=first, second=second, delta=delta, lipschitz=delta / (second - first))
        )

    inner_gaps, outer_gaps = {}, {}
    for s in labels:
        if thetas[0] <= 0:
            inner_gaps[s] = asymptotic_gap(v, s, float(thetas[0]), cfg)
        if thetas[-1] > 0:
            outer_gaps[s] = asymptotic_gap(v, s, float(thetas[-1]), cfg)

    report = AnnulusBundleReport(
        function=v.describe(),
        theta_grid=thetas,
        leaves=leaves,
        inner_circle=circles[0],
        outer_circle=circles[1],
        continuity=tuple(continuity),
        inner_gaps=inner_gaps,
        outer_gaps=outer_gaps,
    )
    logger.info(
        f"annulus_bundle_solve {v.describe()} on {len(labels)} leaves: "
        f"max mismatch {report.max_mismatch:.3g}, max gap {report.max_gap:.3g}"
    )
    return report
