import logging
import re
from abc import ABC, abstractmethod
from typing import Optional, Sequence

import numpy as np

from core.exceptions import ConfigurationError, VanishingFieldError
from core.spec_grammar import split_spec, to_float, to_int
from flow.region import AnnulusRegion, WorkingRegion, default_box
from geometry.spiral import induced_field_at

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

_DIRECTION_KEY = re.compile(r"^d(\d+)$")

DEFAULT_TIME_STEP = 1e-3
DEFAULT_FLOOR = 1e-3


class BaseVectorField(ABC):
    """
    Abstract Base Class for autonomous vector fields on ``R^n``.
    Implement ``_evaluate`` on arrays of shape ``(..., n)``.
    """

    def __init__(self, dimension: int):
        self.dimension = dimension

    @abstractmethod
    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def describe(self) -> str:
        pass

    def __call__(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.dimension:
            raise ConfigurationError(
                f"{self.describe()} acts on dimension {self.dimension}, got shape {points.shape}"
            )
        return self._evaluate(points)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.describe()!r})"


class TranslationField(BaseVectorField):
    """Constant field; its flow is ``x + t d``."""

    def __init__(self, direction: Sequence[float]):
        super().__init__(len(direction))
        self.direction = np.asarray(direction, dtype=float)

    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        return np.broadcast_to(self.direction, points.shape).copy()

    def describe(self) -> str:
        return "translation:" + ",".join(f"d{i}={c!r}" for i, c in enumerate(self.direction))


class RotationField(BaseVectorField):
    """``(-y, x)``; its flow rotates by the elapsed time."""

    def __init__(self):
        super().__init__(2)

    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        return np.stack([-points[..., 1], points[..., 0]], axis=-1)

    def describe(self) -> str:
        return "rotation"


class SpiralField(BaseVectorField):
    """Leaf-tangent field ``(F, G)`` of the annulus spiral foliation; flow time is the angle."""

    def __init__(self):
        super().__init__(2)

    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        field = induced_field_at(points[..., 0], points[..., 1])
        return np.stack([field.F, field.G], axis=-1)

    def describe(self) -> str:
        return "spiral"


class UnitSpeedField(BaseVectorField):
    """``X / |X|``: the same leaves parameterised by arc length."""

    def __init__(self, base: BaseVectorField):
        super().__init__(base.dimension)
        self.base = base

    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        values = self.base._evaluate(points)
        return values / np.linalg.norm(values, axis=-1, keepdims=True)

    def describe(self) -> str:
        return f"{self.base.describe()}:unit=1"


class FlowField:
    """
    A nonvanishing vector field together with its integration settings.

    Construction samples the working region and refuses fields whose speed
    drops below ``floor`` there.
    """

    def __init__(
        self,
        field: BaseVectorField,
        region: Optional[WorkingRegion] = None,
        time_step: float = DEFAULT_TIME_STEP,
        floor: float = DEFAULT_FLOOR,
    ):
        if time_step <= 0:
            raise ConfigurationError(f"Integrator step must be positive, got {time_step}")
        if floor <= 0:
            raise ConfigurationError(f"Nonvanishing floor must be positive, got {floor}")
        self.field = field
        self.region = region or default_box(field.dimension)
        if self.region.dimension != field.dimension:
            raise ConfigurationError(
                f"Region of dimension {self.region.dimension} for a field of dimension "
                f"{field.dimension}"
            )
        self.time_step = float(time_step)
        self.floor = float(floor)
        self.min_speed = self._check_floor()

    @property
    def dimension(self) -> int:
        return self.field.dimension

    def _check_floor(self) -> float:
        samples = self.region.sample()
        speeds = np.linalg.norm(self.field(samples), axis=-1)
        low = int(np.argmin(speeds))
        if speeds[low] < self.floor:
            raise VanishingFieldError(
                f"{self.field.describe()} has speed {speeds[low]!r} at {samples[low].tolist()}, "
                f"below the floor {self.floor}"
            )
        logger.debug(f"{self.field.describe()} minimum sampled speed {speeds[low]:.6g}")
        return float(speeds[low])

    def describe(self) -> str:
        return f"{self.field.describe()} on {self.region.describe()}"


class VectorFieldFactory:
    """Factory for catalog vector fields."""

    @staticmethod
    def create_vector_field(spec: str, dimension: int) -> BaseVectorField:
        """
        Create a vector field from its spec.

        Args:
            spec: ``translation[:d0=,d1=,...]`` (default ``d0=1``), ``rotation`` or
                ``spiral``. Any kind accepts ``unit=1`` for the unit-speed wrapper.
            dimension: Dimension of the ambient space.

        Returns:
            The vector field.
        """
        kind, params = split_spec(spec)
        unit = bool(to_int(params, "unit", 0))
        params.pop("unit", None)

        if kind == "translation":
            direction = [0.0] * dimension
            if not params:
                direction[0] = 1.0
            for key in params:
                match = _DIRECTION_KEY.match(key)
                if not match or int(match.group(1)) >= dimension:
                    raise ConfigurationError(f"Unknown parameter '{key}' for kind 'translation'")
                direction[int(match.group(1))] = to_float(params, key)
            field: BaseVectorField = TranslationField(direction)

        elif kind in ("rotation", "spiral"):
            if params:
                raise ConfigurationError(f"Kind '{kind}' takes no parameters besides unit")
            if dimension != 2:
                raise ConfigurationError(f"Kind '{kind}' lives in dimension 2")
            field = RotationField() if kind == "rotation" else SpiralField()

        else:
            raise ConfigurationError(f"Unknown vector field kind '{kind}' in '{spec}'")

        return UnitSpeedField(field) if unit else field

    @staticmethod
    def default_region(spec: str, dimension: int) -> WorkingRegion:
        """Working region that suits the field kind."""
        kind, _ = split_spec(spec)
        if kind == "spiral":
            return AnnulusRegion()
        if kind == "rotation":
            return AnnulusRegion(inner=0.1, outer=100.0)
        return default_box(dimension)
