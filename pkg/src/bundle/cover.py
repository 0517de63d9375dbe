"""
Box covers of a leaf with constant transition factors.

Each box carries its own representative interval of the base coordinate
``b`` and a local parameter ``t = b + offset`` with unit speed. On an overlap
from box ``i`` to box ``j`` the fiber coordinates satisfy ``u_j = C_ij u_i``;
with the weight ``f_B = e^t`` this means ``C_ij = e^{t_j - t_i}``.
"""

import logging
import math
from collections import deque
from itertools import combinations
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.exceptions import ConfigurationError, CoverStructureError

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

COCYCLE_TOLERANCE = 1e-12
# slack when testing interval containment in base coordinates
_EDGE = 1e-9


class Box(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    start: float
    end: float
    offset: float = 0.0
    weight: Literal["exp"] = "exp"

    @model_validator(mode="after")
    def _check_interval(self):
        if not self.start < self.end:
            raise ValueError(f"Box {self.id} has empty interval [{self.start}, {self.end}]")
        return self

    def contains(self, b: float) -> bool:
        return self.start - _EDGE <= b <= self.end + _EDGE

    def local(self, b):
        """Local parameter ``t = b + offset``."""
        return b + self.offset

    def weight_at(self, b):
        """``f_B = e^t`` at base coordinate ``b``."""
        return math.exp(self.local(b))


class Overlap(BaseModel):
    """Overlap of box ``i`` with box ``j``; ``start``/``end`` are in box ``i``'s representative."""

    model_config = ConfigDict(frozen=True)

    i: str
    j: str
    start: float
    end: float
    transition: Optional[float] = Field(default=None, gt=0)
    label: Optional[str] = None

    @model_validator(mode="after")
    def _check_interval(self):
        if not self.start < self.end:
            raise ValueError(f"Overlap {self.i}->{self.j} has empty interval")
        return self

    @property
    def name(self) -> str:
        return self.label or f"{self.i}->{self.j}@[{self.start:g},{self.end:g}]"


class BundleCover(BaseModel):
    """Boxes, overlaps and transition constants; ``period`` wraps the base coordinate."""

    model_config = ConfigDict(frozen=True)

    name: str = "cover"
    period: Optional[float] = Field(default=None, gt=0)
    boxes: List[Box]
    overlaps: List[Overlap] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_references(self):
        ids = [box.id for box in self.boxes]
        if not ids:
            raise ValueError("A cover needs at least one box")
        if len(set(ids)) != len(ids):
            raise ValueError(f"Duplicate box ids in {ids}")
        for overlap in self.overlaps:
            for ref in (overlap.i, overlap.j):
                if ref not in ids:
                    raise ValueError(f"Overlap {overlap.name} names unknown box '{ref}'")
        return self

    def box(self, box_id: str) -> Box:
        for box in self.boxes:
            if box.id == box_id:
                return box
        raise CoverStructureError(f"Cover {self.name} has no box '{box_id}'")

    def _shifts(self) -> Tuple[float, ...]:
        if self.period is None:
            return (0.0,)
        return (0.0, -self.period, self.period, -2.0 * self.period, 2.0 * self.period)

    def representative(self, b: float, box: Box) -> Optional[float]:
        """``b`` moved by whole periods into ``box``, or None."""
        for shift in self._shifts():
            if box.contains(b + shift):
                return b + shift
        return None

    def shift_to(self, overlap: Overlap) -> float:
        """Base shift taking the overlap from box ``i``'s representative into box ``j``'s."""
        target = self.box(overlap.j)
        for shift in self._shifts():
            if target.contains(overlap.start + shift) and target.contains(overlap.end + shift):
                return shift
        raise CoverStructureError(
            f"Overlap {overlap.name} does not lie in box '{overlap.j}' for any period shift"
        )

    def expected_transition(self, overlap: Overlap) -> float:
        """``e^{t_j - t_i}`` implied by the box offsets."""
        first, second = self.box(overlap.i), self.box(overlap.j)
        return math.exp(self.shift_to(overlap) + second.offset - first.offset)


class CocycleReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    cover: str
    identity_deviation: float = 0.0
    inverse_deviation: float = 0.0
    triple_deviation: float = 0.0
    triples_checked: int = 0
    failures: List[str] = Field(default_factory=list)
    holonomy: Dict[str, float] = Field(default_factory=dict)
    tolerance: float = COCYCLE_TOLERANCE

    @property
    def deviation(self) -> float:
        return max(self.identity_deviation, self.inverse_deviation, self.triple_deviation)

    @property
    def consistent(self) -> bool:
        return self.deviation <= self.tolerance


def _transition(overlap: Overlap) -> float:
    if overlap.transition is None:
        raise CoverStructureError(f"Overlap {overlap.name} declares no transition constant")
    return overlap.transition


def _interval_in(cover: BundleCover, overlap: Overlap, box: Box) -> Optional[Tuple[float, float]]:
    """Overlap interval expressed in ``box``'s representative."""
    for shift in cover._shifts():
        lo, hi = overlap.start + shift, overlap.end + shift
        if lo < box.end and hi > box.start:
            return lo, hi
    return None


def _edges(cover: BundleCover) -> Dict[Tuple[str, str], List[Tuple[Overlap, float]]]:
    """Transitions in both directions, keyed by ordered box pair."""
    edges: Dict[Tuple[str, str], List[Tuple[Overlap, float]]] = {}
    for overlap in cover.overlaps:
        c = _transition(overlap)
        edges.setdefault((overlap.i, overlap.j), []).append((overlap, c))
        if overlap.i != overlap.j:
            edges.setdefault((overlap.j, overlap.i), []).append((overlap, 1.0 / c))
    return edges


def _holonomy(cover: BundleCover) -> Dict[str, float]:
    """Transition products around the cycles closed by wrapping overlaps."""
    potential = {cover.boxes[0].id: 1.0}
    queue = deque([cover.boxes[0].id])
    tree = set()
    while queue:
        current = queue.popleft()
        for overlap in cover.overlaps:
            if overlap.i == overlap.j or cover.shift_to(overlap) != 0.0:
                continue
            if current not in (overlap.i, overlap.j):
                continue
            other = overlap.j if overlap.i == current else overlap.i
            if other in potential:
                continue
            factor = _transition(overlap) if overlap.i == current else 1.0 / _transition(overlap)
            potential[other] = potential[current] * factor
            tree.add(overlap.name)
            queue.append(other)

    loops = {}
    for overlap in cover.overlaps:
        if overlap.name in tree or cover.shift_to(overlap) == 0.0:
            continue
        if overlap.i in potential and overlap.j in potential:
            loops[overlap.name] = potential[overlap.i] * _transition(overlap) / potential[overlap.j]
    return loops


def verify_cocycle(cover: BundleCover, tolerance: float = COCYCLE_TOLERANCE) -> CocycleReport:
    """
    Check ``C_ii = 1``, ``C_ij C_ji = 1`` and ``C_ij C_jk = C_ik`` on triple overlaps.

    Triples are checked only where the three pairwise overlaps share a base
    point. Products around cycles that wrap the period are reported as
    holonomy and never count as failures.

    Args:
        cover: Cover to check.
        tolerance: Largest accepted deviation.

    Returns:
        The cocycle report.

    Raises:
        CoverStructureError: An overlap has no transition constant or does
            not fit in its target box.
    """
    edges = _edges(cover)
    failures = []

    identity = 0.0
    for overlap in cover.overlaps:
        if overlap.i == overlap.j:
            deviation = abs(_transition(overlap) - 1.0)
            identity = max(identity, deviation)
            if deviation > tolerance:
                failures.append(f"identity {overlap.name}: C = {overlap.transition!r}")

    inverse = 0.0
    for first in cover.overlaps:
        for second in cover.overlaps:
            if first is second or (first.i, first.j) != (second.j, second.i):
                continue
            region = _interval_in(cover, second, cover.box(first.i))
            if region is None or region[1] <= first.start or region[0] >= first.end:
                continue
            deviation = abs(_transition(first) * _transition(second) - 1.0)
            inverse = max(inverse, deviation)
            if deviation > tolerance:
                failures.append(f"inverse {first.name} / {second.name}: deviation {deviation:.3g}")

    triple, checked = 0.0, 0
    for i, j, k in combinations([box.id for box in cover.boxes], 3):
        for o_ij, c_ij in edges.get((i, j), []):
            for o_jk, c_jk in edges.get((j, k), []):
                for o_ik, c_ik in edges.get((i, k), []):
                    home = cover.box(i)
                    spans = [_interval_in(cover, o, home) for o in (o_ij, o_jk, o_ik)]
                    if any(s is None for s in spans):
                        continue
                    lo = max(s[0] for s in spans)
                    hi = min(s[1] for s in spans)
                    if lo >= hi:
                        continue
                    checked += 1
                    deviation = abs(c_ij * c_jk - c_ik)
                    triple = max(triple, deviation)
                    if deviation > tolerance:
                        failures.append(
                            f"triple {i},{j},{k}: |{c_ij:g} * {c_jk:g} - {c_ik:g}| = {deviation:.3g}"
                        )

    report = CocycleReport(
        cover=cover.name,
        identity_deviation=identity,
        inverse_deviation=inverse,
        triple_deviation=triple,
        triples_checked=checked,
        failures=failures,
        holonomy=_holonomy(cover),
        tolerance=tolerance,
    )
    if report.consistent:
        logger.info(f"Cover {cover.name}: cocycle consistent, {checked} triple(s) checked")
    else:
        logger.warning(f"Cover {cover.name}: cocycle deviation {report.deviation:.3g}")
    return report


def load_cover(path) -> BundleCover:
    """Read a cover description from a JSON file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"Cannot read cover file {path}: {e}") from e
    cover = BundleCover.model_validate_json(text)
    logger.info(f"Loaded cover {cover.name} with {len(cover.boxes)} box(es) from {path}")
    return cover
