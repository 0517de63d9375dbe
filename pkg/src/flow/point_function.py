import logging
import re
from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np

from core.exceptions import ConfigurationError, EvaluationError
from core.spec_grammar import reject_unknown, split_spec, to_float, to_int
from flow.region import AnnulusRegion, WorkingRegion
from geometry.annulus_function import AnnulusFunction

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

_LINEAR_KEY = re.compile(r"^a(\d+)$")


class BasePointFunction(ABC):
    """
    Abstract Base Class for real functions on ``R^n`` with known gradients.
    Points are arrays whose last axis has length ``dimension``.
    """

    def __init__(self, dimension: int):
        if dimension < 1:
            raise ConfigurationError(f"Dimension must be positive, got {dimension}")
        self.dimension = dimension

    @abstractmethod
    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def gradient(self, points) -> np.ndarray:
        """Gradient at ``points``, same shape as ``points``."""
        pass

    @abstractmethod
    def bound_on(self, region: WorkingRegion) -> float:
        """Certified sup of ``|V|`` over the working region."""
        pass

    @abstractmethod
    def describe(self) -> str:
        pass

    def _points(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.dimension:
            raise ConfigurationError(
                f"{self.describe()} expects points of dimension {self.dimension}, "
                f"got shape {points.shape}"
            )
        return points

    def __call__(self, points) -> np.ndarray:
        return self._evaluate(self._points(points))

    def evaluate_checked(self, points) -> np.ndarray:
        points = self._points(points)
        values = self._evaluate(points)
        finite = np.isfinite(values)
        if not np.all(finite):
            bad = points.reshape(-1, self.dimension)[np.flatnonzero(~finite.ravel())[0]]
            raise EvaluationError(
                f"{self.describe()} is not finite at {bad.tolist()}", point=bad.tolist()
            )
        return values

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.describe()!r})"


class ConstantPointFunction(BasePointFunction):
    def __init__(self, value: float, dimension: int):
        super().__init__(dimension)
        self.value = float(value)

    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        return np.full(points.shape[:-1], self.value)

    def gradient(self, points) -> np.ndarray:
        return np.zeros_like(self._points(points))

    def bound_on(self, region: WorkingRegion) -> float:
        return abs(self.value)

    def describe(self) -> str:
        return f"const:{self.value!r}"


class LinearPointFunction(BasePointFunction):
    """``a . x + b``; bounded only on a bounded region."""

    def __init__(self, coefficients: Sequence[float], offset: float = 0.0):
        super().__init__(len(coefficients))
        self.coefficients = np.asarray(coefficients, dtype=float)
        self.offset = float(offset)

    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        return points @ self.coefficients + self.offset

    def gradient(self, points) -> np.ndarray:
        points = self._points(points)
        return np.broadcast_to(self.coefficients, points.shape).copy()

    def bound_on(self, region: WorkingRegion) -> float:
        if isinstance(region, AnnulusRegion):
            return abs(self.offset) + float(np.linalg.norm(self.coefficients)) * region.outer
        corners = np.maximum(np.abs(region.lower), np.abs(region.upper))
        return abs(self.offset) + float(np.abs(self.coefficients) @ corners)

    def describe(self) -> str:
        parts = [f"a{i}={c!r}" for i, c in enumerate(self.coefficients)]
        return "linear:" + ",".join([*parts, f"b={self.offset!r}"])


class SinePointFunction(BasePointFunction):
    """``amp * sin(k x_axis + phase)``."""

    def __init__(
        self,
        dimension: int,
        axis: int = 0,
        frequency: float = 1.0,
        amplitude: float = 1.0,
        phase: float = 0.0,
    ):
        super().__init__(dimension)
        if not 0 <= axis < dimension:
            raise ConfigurationError(f"Axis {axis} outside dimension {dimension}")
        self.axis = axis
        self.frequency = float(frequency)
        self.amplitude = float(amplitude)
        self.phase = float(phase)

    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        return self.amplitude * np.sin(self.frequency * points[..., self.axis] + self.phase)

    def gradient(self, points) -> np.ndarray:
        points = self._points(points)
        out = np.zeros_like(points)
        out[..., self.axis] = (
            self.amplitude
            * self.frequency
            * np.cos(self.frequency * points[..., self.axis] + self.phase)
        )
        return out

    def bound_on(self, region: WorkingRegion) -> float:
        return abs(self.amplitude)

    def describe(self) -> str:
        return (
            f"sin:axis={self.axis},k={self.frequency!r},"
            f"amp={self.amplitude!r},phase={self.phase!r}"
        )


class AnnulusPointFunction(BasePointFunction):
    """An annulus catalog function read in Cartesian coordinates."""

    def __init__(self, function: AnnulusFunction):
        super().__init__(2)
        self.function = function

    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        x, y = points[..., 0], points[..., 1]
        return self.function(np.hypot(x, y), np.arctan2(y, x))

    def gradient(self, points) -> np.ndarray:
        points = self._points(points)
        x, y = points[..., 0], points[..., 1]
        r = np.hypot(x, y)
        d_r, d_theta = self.function.partials(r, np.arctan2(y, x))
        return np.stack(
            [d_r * x / r - d_theta * y / (r * r), d_r * y / r + d_theta * x / (r * r)],
            axis=-1,
        )

    def bound_on(self, region: WorkingRegion) -> float:
        return self.function.bound

    def describe(self) -> str:
        return self.function.describe()


class PointFunctionFactory:
    """Factory for point functions on ``R^n``."""

    @staticmethod
    def create_point_function(spec: str, dimension: int) -> BasePointFunction:
        """
        Create a point function from its spec.

        Args:
            spec: ``const:c``, ``linear:a0=,a1=,b=``, ``sin:axis=,k=,amp=,phase=``
                or an ``annulus:...`` spec (dimension 2 only).
            dimension: Dimension of the ambient space.

        Returns:
            The point function.
        """
        kind, params = split_spec(spec)

        if kind == "const":
            key = "value" if "value" in params else "c"
            reject_unknown(params, [key], kind)
            return ConstantPointFunction(to_float(params, key, 0.0), dimension)

        elif kind == "linear":
            offset = to_float(params, "b", 0.0)
            coefficients = [0.0] * dimension
            for key in params:
                if key == "b":
                    continue
                match = _LINEAR_KEY.match(key)
                if not match or int(match.group(1)) >= dimension:
                    raise ConfigurationError(f"Unknown parameter '{key}' for kind 'linear'")
                coefficients[int(match.group(1))] = to_float(params, key)
            return LinearPointFunction(coefficients, offset)

        elif kind == "sin":
            reject_unknown(params, ["axis", "k", "amp", "phase"], kind)
            return SinePointFunction(
                dimension,
                axis=to_int(params, "axis", 0),
                frequency=to_float(params, "k", 1.0),
                amplitude=to_float(params, "amp", 1.0),
                phase=to_float(params, "phase", 0.0),
            )

        elif kind == "annulus":
            if dimension != 2:
                raise ConfigurationError("annulus functions live in dimension 2")
            return AnnulusPointFunction(AnnulusFunction.from_spec(spec))

        raise ConfigurationError(f"Unknown point function kind '{kind}' in '{spec}'")
