import logging
import math
from typing import Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)


class BoxRegion(BaseModel):
    """Closed axis-aligned box ``lower <= x <= upper`` that integral curves must stay in."""

    model_config = ConfigDict(frozen=True)

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    @model_validator(mode="after")
    def _check_corners(self):
        if len(self.lower) != len(self.upper) or not self.lower:
            raise ValueError("Box corners need the same positive dimension")
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError(f"Box lower corner {self.lower} must lie below {self.upper}")
        return self

    @property
    def dimension(self) -> int:
        return len(self.lower)

    def contains(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return np.all(
            (points >= np.asarray(self.lower)) & (points <= np.asarray(self.upper)), axis=-1
        )

    def sample(self, per_axis: int = 33) -> np.ndarray:
        """Lattice of points covering the box, shape ``(per_axis ** n, n)``."""
        axes = [np.linspace(lo, hi, per_axis) for lo, hi in zip(self.lower, self.upper)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def describe(self) -> str:
        return f"box {list(self.lower)}..{list(self.upper)}"


class AnnulusRegion(BaseModel):
    """Open planar annulus ``inner < |x| < outer``."""

    model_config = ConfigDict(frozen=True)

    inner: float = Field(default=1.0, ge=0)
    outer: float = Field(default=2.0, gt=0)

    @model_validator(mode="after")
    def _check_radii(self):
        if self.inner >= self.outer:
            raise ValueError(f"Inner radius {self.inner} must be below outer {self.outer}")
        return self

    @property
    def dimension(self) -> int:
        return 2

    def contains(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        rho = np.hypot(points[..., 0], points[..., 1])
        return (rho > self.inner) & (rho < self.outer)

    def sample(self, per_axis: int = 33) -> np.ndarray:
        """Polar lattice strictly inside the annulus."""
        span = self.outer - self.inner
        radii = np.linspace(self.inner + 0.01 * span, self.outer - 0.01 * span, per_axis)
        angles = np.linspace(0.0, 2.0 * math.pi, 4 * per_axis, endpoint=False)
        r, a = np.meshgrid(radii, angles, indexing="ij")
        return np.stack([(r * np.cos(a)).ravel(), (r * np.sin(a)).ravel()], axis=-1)

    def describe(self) -> str:
        return f"annulus {self.inner} < |x| < {self.outer}"


WorkingRegion = Union[BoxRegion, AnnulusRegion]


def default_box(dimension: int, half_width: float = 100.0) -> BoxRegion:
    """Symmetric box used when no working region is given."""
    return BoxRegion(lower=(-half_width,) * dimension, upper=(half_width,) * dimension)
