"""
Flow map ``Phi(x, t)`` of a nonvanishing vector field by classical RK4.

Trajectories are integrated in displacement form: the state is the offset
from the start point, so every point of a batch sees the same rounding when
the field is constant. Steps run from one requested time to the next, never
longer than the field's time step, and the working region is checked after
every step.
"""

import logging
import math
import threading
from typing import Dict, Hashable

import numpy as np

from core.exceptions import ConfigurationError, FlowEscapeError, OutOfAnnulusError
from flow.vector_field import FlowField

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

DEFAULT_CACHE_ENTRIES = 256


class FlowMap:
    """Integral curves of a ``FlowField`` with a thread-safe trajectory cache."""

    def __init__(
        self,
        field: FlowField,
        cache: bool = True,
        max_entries: int = DEFAULT_CACHE_ENTRIES,
    ):
        """
        Initialize the flow map.

        Args:
            field: The vector field and its integration settings.
            cache: Keep computed trajectories keyed by start points and times.
            max_entries: Cache capacity; new trajectories are not stored beyond it.
        """
        self.field = field
        self.cache_enabled = cache
        self.max_entries = max_entries
        self._cache: Dict[Hashable, np.ndarray] = {}
        self._lock = threading.Lock()

    @property
    def dimension(self) -> int:
        return self.field.dimension

    @property
    def cache_size(self) -> int:
        return len(self._cache)

    def clear_cache(self) -> None:
        with self._lock:
            self._cache.clear()

    def _origins(self, points) -> np.ndarray:
        origins = np.array(points, dtype=float, ndmin=2)
        if origins.ndim != 2 or origins.shape[1] != self.dimension:
            raise ConfigurationError(
                f"Expected points of dimension {self.dimension}, got shape {origins.shape}"
            )
        return origins

    def flow(self, x, t: float) -> np.ndarray:
        """``Phi(x, t)`` for a single point ``x``."""
        return self.flow_batch(self._origins(x), t)[0]

    def flow_batch(self, points, t: float) -> np.ndarray:
        """``Phi(x, t)`` for every row of ``points``, shape ``(m, n)``."""
        return self.sample_trajectories(points, np.array([float(t)]))[0]

    def sample_trajectories(self, points, times) -> np.ndarray:
        """
        Positions of every start point at every requested time.

        Args:
            points: Start points, shape ``(m, n)``.
            times: Flow times of either sign, any order.

        Returns:
            Array of shape ``(len(times), m, n)``; ``times == 0`` rows equal
            ``points`` exactly.

        Raises:
            FlowEscapeError: A trajectory left the working region.
        """
        origins = self._origins(points)
        times = np.asarray(times, dtype=float).ravel()
        if not np.all(np.isfinite(times)):
            raise ConfigurationError("Flow times must be finite")

        key = (origins.shape, origins.tobytes(), times.tobytes())
        cached = self._cache.get(key) if self.cache_enabled else None
        if cached is not None:
            return cached

        out = np.empty((times.size, *origins.shape))
        for direction in (1.0, -1.0):
            selected = np.flatnonzero(times * direction > 0)
            if selected.size:
                out[selected] = self._integrate(origins, times[selected] * direction, direction)
        out[times == 0] = origins
        out.flags.writeable = False

        if self.cache_enabled:
            with self._lock:
                if len(self._cache) < self.max_entries:
                    self._cache.setdefault(key, out)
        return out

    def semigroup_defect(self, x, a: float, b: float) -> float:
        """``|Phi(Phi(x, a), b) - Phi(x, a + b)|``."""
        first = self.flow(self.flow(x, a), b)
        return float(np.linalg.norm(first - self.flow(x, a + b)))

    def _integrate(
        self, origins: np.ndarray, durations: np.ndarray, direction: float
    ) -> np.ndarray:
        order = np.argsort(durations, kind="stable")
        out = np.empty((durations.size, *origins.shape))
        displacement = np.zeros_like(origins)
        elapsed = 0.0
        for index in order:
            target = durations[index]
            span = target - elapsed
            if span > 0:
                steps = max(1, math.ceil(span / self.field.time_step - 1e-9))
                h = span / steps
                for k in range(steps):
                    displacement = self._step(
                        origins, displacement, direction * h, direction * (elapsed + k * h)
                    )
                    self._check_region(
                        origins + displacement, direction * (elapsed + (k + 1) * h)
                    )
                elapsed = target
            out[index] = origins + displacement
        logger.debug(
            f"Integrated {origins.shape[0]} trajectories to |t|={elapsed:.6g} "
            f"in direction {direction:+.0f}"
        )
        return out

    def _evaluate(self, points: np.ndarray, time: float) -> np.ndarray:
        try:
            return self.field.field(points)
        except OutOfAnnulusError as e:
            raise FlowEscapeError(
                f"Trajectory left the domain of {self.field.field.describe()} near t={time!r}",
                exit_time=time,
            ) from e

    def _step(
        self, origins: np.ndarray, displacement: np.ndarray, h: float, time: float
    ) -> np.ndarray:
        k1 = self._evaluate(origins + displacement, time)
        k2 = self._evaluate(origins + (displacement + 0.5 * h * k1), time)
        k3 = self._evaluate(origins + (displacement + 0.5 * h * k2), time)
        k4 = self._evaluate(origins + (displacement + h * k3), time)
        return displacement + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def _check_region(self, positions: np.ndarray, time: float) -> None:
        inside = self.field.region.contains(positions)
        if np.all(inside):
            return
        point = positions[np.flatnonzero(~inside)[0]]
        raise FlowEscapeError(
            f"Trajectory left {self.field.region.describe()} at t={time!r}, "
            f"position {point.tolist()}",
            exit_time=time,
            point=point.tolist(),
        )
