import logging
import math
from abc import ABC, abstractmethod
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from core.exceptions import ConfigurationError, EvaluationError

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

CERTIFICATION_SAMPLES = 4097
_BOUND_SLACK = 1e-12


class LeafFunctionKind(str, Enum):
    CONSTANT = "const"
    TRIGONOMETRIC = "fourier"
    POLYNOMIAL = "poly"
    SAMPLES = "samples"
    RESTRICTION = "restriction"


class BaseLeafFunction(ABC):
    """
    Abstract Base Class for real functions of one leaf parameter.
    Every instance carries a certified sup-norm bound ``M``, checked by
    dense sampling when the instance is built.
    """

    kind: LeafFunctionKind

    def __init__(self, bound: float):
        """
        Initialize the base leaf function.

        Args:
            bound: Certified bound on ``|v|`` over the evaluation domain.
        """
        if not math.isfinite(bound) or bound < 0:
            raise ConfigurationError(f"Bound must be finite and non-negative, got {bound}")
        self._bound = float(bound)

    @property
    def bound(self) -> float:
        return self._bound

    @property
    def period(self) -> Optional[float]:
        """Period of the function, or None when it has no fixed period."""
        return None

    @property
    def is_periodic(self) -> bool:
        return self.period is not None

    @abstractmethod
    def _evaluate(self, t: np.ndarray) -> np.ndarray:
        """
        Evaluate the function on an array of leaf parameters.

        Args:
            t: Array of real arguments, any shape.

        Returns:
            Array of values with the same shape.
        """
        pass

    @abstractmethod
    def certification_domain(self) -> Tuple[float, float]:
        """Interval sampled when certifying the bound."""
        pass

    @abstractmethod
    def describe(self) -> str:
        """Catalog spec that rebuilds this function."""
        pass

    def __call__(self, t) -> np.ndarray:
        return self._evaluate(np.asarray(t, dtype=float))

    def evaluate_checked(self, t) -> np.ndarray:
        """Evaluate and raise an evaluation error naming the first non-finite point."""
        args = np.asarray(t, dtype=float)
        values = self._evaluate(args)
        finite = np.isfinite(values)
        if not np.all(finite):
            point = float(args.ravel()[np.flatnonzero(~finite.ravel())[0]])
            raise EvaluationError(
                f"{self.describe()} is not finite at t={point!r}", point=point
            )
        return values

    def clamps(self, t) -> bool:
        """True when some argument falls outside the stated interval."""
        return False

    def shifted(self, delta: float) -> "BaseLeafFunction":
        """The function ``t -> v(t - delta)``."""
        return LeafRestriction(
            lambda t: self._evaluate(t - delta),
            bound=self.bound,
            period=self.period,
            label=f"{self.describe()} shifted by {delta!r}",
            domain=tuple(end + delta for end in self.certification_domain()),
            periodic_any=isinstance(self, ConstantFunction),
            clamps=lambda t: self.clamps(np.asarray(t, dtype=float) - delta),
        )

    def _certify_bound(self) -> None:
        lo, hi = self.certification_domain()
        samples = np.linspace(lo, hi, CERTIFICATION_SAMPLES)
        sampled = float(np.max(np.abs(self._evaluate(samples))))
        if not math.isfinite(sampled):
            raise EvaluationError(f"{self.describe()} is not finite on [{lo}, {hi}]")
        if sampled > self._bound * (1.0 + _BOUND_SLACK) + 1e-300:
            raise ConfigurationError(
                f"Bound {self._bound} of {self.describe()} is below the sampled sup {sampled}"
            )
        logger.debug(f"Certified bound {self._bound} for {self.describe()}")

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.describe()!r}, M={self._bound})"


class ConstantFunction(BaseLeafFunction):
    """The constant ``c``; periodic with every period."""

    kind = LeafFunctionKind.CONSTANT

    def __init__(self, value: float):
        self.value = float(value)
        super().__init__(abs(self.value))
        self._certify_bound()

    @property
    def is_periodic(self) -> bool:
        return True

    def _evaluate(self, t: np.ndarray) -> np.ndarray:
        return np.full(t.shape, self.value)

    def certification_domain(self) -> Tuple[float, float]:
        return (-1.0, 1.0)

    def describe(self) -> str:
        return f"const:{self.value!r}"


class TrigonometricFunction(BaseLeafFunction):
    """
    ``a0 + sum_k a_k cos(2 pi k t / P) + b_k sin(2 pi k t / P)``.

    The bound is the absolute coefficient sum.
    """

    kind = LeafFunctionKind.TRIGONOMETRIC

    def __init__(
        self,
        period: float,
        constant: float = 0.0,
        cosines: Sequence[float] = (),
        sines: Sequence[float] = (),
    ):
        if not math.isfinite(period) or period <= 0:
            raise ConfigurationError(f"Period must be positive, got {period}")
        self._period = float(period)
        self.constant = float(constant)
        size = max(len(cosines), len(sines))
        self.cosines = np.zeros(size)
        self.sines = np.zeros(size)
        self.cosines[: len(cosines)] = np.asarray(cosines, dtype=float)
        self.sines[: len(sines)] = np.asarray(sines, dtype=float)
        bound = abs(self.constant) + float(np.sum(np.abs(self.cosines) + np.abs(self.sines)))
        super().__init__(bound)
        self._certify_bound()

    @property
    def period(self) -> float:
        return self._period

    @property
    def frequencies(self) -> np.ndarray:
        """Angular frequencies ``2 pi k / P`` of the modes."""
        return 2.0 * math.pi * np.arange(1, self.cosines.size + 1) / self._period

    def _evaluate(self, t: np.ndarray) -> np.ndarray:
        out = np.full(t.shape, self.constant)
        for omega, a, b in zip(self.frequencies, self.cosines, self.sines):
            if a:
                out = out + a * np.cos(omega * t)
            if b:
                out = out + b * np.sin(omega * t)
        return out

    def certification_domain(self) -> Tuple[float, float]:
        return (0.0, self._period)

    def describe(self) -> str:
        parts = [f"P={self._period!r}", f"a0={self.constant!r}"]
        for k, (a, b) in enumerate(zip(self.cosines, self.sines), start=1):
            if a:
                parts.append(f"a{k}={a!r}")
            if b:
                parts.append(f"b{k}={b!r}")
        return "fourier:" + ",".join(parts)


class PolynomialFunction(BaseLeafFunction):
    """Polynomial on ``[lo, hi]``, clamped to its end values outside."""

    kind = LeafFunctionKind.POLYNOMIAL

    def __init__(self, coefficients: Sequence[float], interval: Tuple[float, float]):
        lo, hi = (float(interval[0]), float(interval[1]))
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
            raise ConfigurationError(f"Polynomial interval must satisfy lo < hi, got {interval}")
        if len(coefficients) == 0:
            raise ConfigurationError("Polynomial needs at least one coefficient")
        self.polynomial = np.polynomial.Polynomial(np.asarray(coefficients, dtype=float))
        self.interval = (lo, hi)

        # exact sup: endpoints and real critical points inside the interval
        candidates = [lo, hi]
        critical = self.polynomial.deriv().roots() if self.polynomial.degree() > 1 else []
        for root in np.atleast_1d(critical):
            if abs(root.imag) < 1e-12 and lo < root.real < hi:
                candidates.append(float(root.real))
        bound = float(np.max(np.abs(self.polynomial(np.array(candidates)))))
        super().__init__(bound * (1.0 + 1e-14))
        self._certify_bound()

    def _evaluate(self, t: np.ndarray) -> np.ndarray:
        return self.polynomial(np.clip(t, *self.interval))

    def clamps(self, t) -> bool:
        t = np.asarray(t, dtype=float)
        lo, hi = self.interval
        return bool(np.any((t < lo) | (t > hi)))

    def certification_domain(self) -> Tuple[float, float]:
        return self.interval

    def describe(self) -> str:
        parts = [f"c{k}={c!r}" for k, c in enumerate(self.polynomial.coef)]
        parts += [f"lo={self.interval[0]!r}", f"hi={self.interval[1]!r}"]
        return "poly:" + ",".join(parts)


class SampledFunction(BaseLeafFunction):
    """
    Interpolated samples (linear or cubic).

    Non-periodic samples clamp outside the grid; periodic samples wrap with
    period ``grid[-1] - grid[0]`` and need matching end values.
    """

    kind = LeafFunctionKind.SAMPLES

    def __init__(
        self,
        grid: Sequence[float],
        values: Sequence[float],
        order: int = 1,
        periodic: bool = False,
        source: str = "inline",
    ):
        self.grid = np.asarray(grid, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.grid.ndim != 1 or self.grid.size != self.values.size or self.grid.size < 2:
            raise ConfigurationError("Samples need matching 1-D grid and values of length >= 2")
        if np.any(np.diff(self.grid) <= 0):
            raise ConfigurationError("Sample grid must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ConfigurationError("Sample values must be finite")
        if order not in (1, 3):
            raise ConfigurationError(f"Interpolation order must be 1 or 3, got {order}")
        if order == 3 and self.grid.size < 4:
            raise ConfigurationError("Cubic interpolation needs at least 4 samples")
        if periodic and not math.isclose(self.values[0], self.values[-1], abs_tol=1e-12):
            raise ConfigurationError("Periodic samples need equal first and last values")

        self.order = order
        self.periodic = periodic
        self.source = source
        self._spline: Optional[CubicSpline] = None
        if order == 3:
            values_for_spline = self.values.copy()
            if periodic:
                values_for_spline[-1] = values_for_spline[0]
            self._spline = CubicSpline(
                self.grid, values_for_spline, bc_type="periodic" if periodic else "not-a-knot"
            )
        super().__init__(self._exact_sup())
        self._certify_bound()

    def _exact_sup(self) -> float:
        if self._spline is None:
            return float(np.max(np.abs(self.values)))
        candidates = [self.grid[0], self.grid[-1]]
        candidates.extend(
            root for root in np.atleast_1d(self._spline.derivative().roots(extrapolate=False))
            if np.isfinite(root)
        )
        sup = float(np.max(np.abs(self._spline(np.asarray(candidates)))))
        return max(sup, float(np.max(np.abs(self.values)))) * (1.0 + 1e-12)

    @property
    def period(self) -> Optional[float]:
        return float(self.grid[-1] - self.grid[0]) if self.periodic else None

    def _wrap(self, t: np.ndarray) -> np.ndarray:
        if self.periodic:
            return self.grid[0] + np.mod(t - self.grid[0], self.period)
        return np.clip(t, self.grid[0], self.grid[-1])

    def _evaluate(self, t: np.ndarray) -> np.ndarray:
        wrapped = self._wrap(t)
        if self._spline is None:
            return np.interp(wrapped, self.grid, self.values)
        return self._spline(wrapped)

    def clamps(self, t) -> bool:
        if self.periodic:
            return False
        t = np.asarray(t, dtype=float)
        return bool(np.any((t < self.grid[0]) | (t > self.grid[-1])))

    def certification_domain(self) -> Tuple[float, float]:
        return (float(self.grid[0]), float(self.grid[-1]))

    def describe(self) -> str:
        return f"samples:file={self.source},order={self.order},periodic={int(self.periodic)}"


class LeafRestriction(BaseLeafFunction):
    """A function inherited from a larger space, restricted to one leaf."""

    kind = LeafFunctionKind.RESTRICTION

    def __init__(
        self,
        func: Callable[[np.ndarray], np.ndarray],
        bound: float,
        period: Optional[float] = None,
        label: str = "restriction",
        domain: Tuple[float, float] = (-50.0, 50.0),
        periodic_any: bool = False,
        clamps: Optional[Callable[[np.ndarray], bool]] = None,
    ):
        self._func = func
        self._clamps = clamps
        self._period = period
        self._label = label
        self._domain = domain
        self._periodic_any = periodic_any
        super().__init__(bound)
        self._certify_bound()

    @property
    def period(self) -> Optional[float]:
        return self._period

    @property
    def is_periodic(self) -> bool:
        return self._periodic_any or self._period is not None

    def _evaluate(self, t: np.ndarray) -> np.ndarray:
        return np.asarray(self._func(t), dtype=float) * np.ones(t.shape)

    def clamps(self, t) -> bool:
        return bool(self._clamps(t)) if self._clamps is not None else False

    def certification_domain(self) -> Tuple[float, float]:
        if self._period is not None:
            return (0.0, self._period)
        return self._domain

    def describe(self) -> str:
        return self._label
