from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from core.exceptions import ConfigurationError
from solver.operator_config import OperatorConfig


def as_grid(grid) -> np.ndarray:
    """Validate a leaf grid: non-empty, 1-D, finite and strictly increasing."""
    points = np.array(grid, dtype=float).ravel()
    if points.size == 0:
        raise ConfigurationError("Grid must contain at least one point")
    if not np.all(np.isfinite(points)):
        raise ConfigurationError("Grid points must be finite")
    if np.any(np.diff(points) <= 0):
        raise ConfigurationError("Grid must be strictly increasing")
    return points


def _frozen(values: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class SolutionProfile:
    """Sampled solution on a leaf with the settings that produced it."""

    grid: np.ndarray
    values: np.ndarray
    config: OperatorConfig
    truncation: Optional[float] = None
    residual_sup: Optional[float] = None
    periodicity_defect: Optional[float] = None
    clamped: bool = False
    label: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = as_grid(self.grid)
        values = np.array(self.values, dtype=float).ravel()
        if values.shape != grid.shape:
            raise ConfigurationError(
                f"Profile has {grid.size} grid points but {values.size} values"
            )
        if not np.all(np.isfinite(values)):
            raise ConfigurationError("Profile values must be finite")
        object.__setattr__(self, "grid", _frozen(grid))
        object.__setattr__(self, "values", _frozen(values))

    def __len__(self) -> int:
        return self.grid.size

    def with_values(self, values) -> "SolutionProfile":
        """Copy with replaced values; the residual is dropped."""
        return replace(self, values=np.asarray(values, dtype=float), residual_sup=None)

    def with_residual(self, residual: float) -> "SolutionProfile":
        return replace(self, residual_sup=float(residual))
