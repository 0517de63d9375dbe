import logging
import math
import re
from dataclasses import replace
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.exceptions import (
    ConfigurationError,
    LeafFunctionTypeError,
    PeriodicityError,
)
from core.spec_grammar import split_spec, to_float
from solver.leaf_function import LeafRestriction
from solver.line_operator import solve_on_line
from solver.operator_config import OperatorConfig
from solver.profile import SolutionProfile

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)

_MODE_KEY = re.compile(r"^(cos|sin)_(-?\d+)_(-?\d+)$")


class TorusMode(BaseModel):
    """One Fourier mode ``a cos(2 pi (kx x + ky y)) + b sin(...)``."""

    model_config = ConfigDict(frozen=True)

    kx: int
    ky: int
    cos: float = 0.0
    sin: float = 0.0


class TorusFunction(BaseModel):
    """Trigonometric polynomial on the unit torus; 1-periodic in x and y."""

    model_config = ConfigDict(frozen=True)

    constant: float = 0.0
    modes: List[TorusMode] = Field(default_factory=list)

    @property
    def bound(self) -> float:
        return abs(self.constant) + sum(abs(m.cos) + abs(m.sin) for m in self.modes)

    def __call__(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.full(np.broadcast(x, y).shape, self.constant)
        for mode in self.modes:
            phase = 2.0 * math.pi * (mode.kx * x + mode.ky * y)
            if mode.cos:
                out = out + mode.cos * np.cos(phase)
            if mode.sin:
                out = out + mode.sin * np.sin(phase)
        return out

    def describe(self) -> str:
        parts = [f"c={self.constant!r}"]
        for m in self.modes:
            if m.cos:
                parts.append(f"cos_{m.kx}_{m.ky}={m.cos!r}")
            if m.sin:
                parts.append(f"sin_{m.kx}_{m.ky}={m.sin!r}")
        return "torus:" + ",".join(parts)

    @classmethod
    def from_spec(cls, spec: str) -> "TorusFunction":
        """
        Parse ``torus:c=,cos_KX_KY=,sin_KX_KY=`` or ``const:c``.

        ``cos_1_0=1`` is ``cos(2 pi x)``.
        """
        kind, params = split_spec(spec)
        if kind == "const":
            return cls(constant=to_float(params, "value" if "value" in params else "c", 0.0))
        if kind != "torus":
            raise ConfigurationError(f"Unknown torus function kind '{kind}'")

        constant = to_float(params, "c", 0.0)
        amplitudes: dict[Tuple[int, int], dict[str, float]] = {}
        for key in params:
            if key == "c":
                continue
            match = _MODE_KEY.match(key)
            if not match:
                raise ConfigurationError(f"Unknown parameter '{key}' for kind 'torus'")
            wave, kx, ky = match.group(1), int(match.group(2)), int(match.group(3))
            amplitudes.setdefault((kx, ky), {})[wave] = to_float(params, key)
        modes = [TorusMode(kx=kx, ky=ky, **waves) for (kx, ky), waves in amplitudes.items()]
        return cls(constant=constant, modes=modes)


class TorusFlow(BaseModel):
    """Linear foliation of the torus by lines of fixed slope."""

    model_config = ConfigDict(frozen=True)

    slope: float = SQRT2

    def leaf_point(self, t, offset: float) -> Tuple[np.ndarray, np.ndarray]:
        """Point ``(t mod 1, (slope t + C) mod 1)`` on the leaf with offset ``C``."""
        t = np.asarray(t, dtype=float)
        return np.mod(t, 1.0), np.mod(self.slope * t + offset, 1.0)

    def offset_through(self, x: float, y: float) -> float:
        """Offset ``C`` of the leaf through ``(x, y)`` parameterised by ``t = x``."""
        return y - self.slope * x

    def restrict(self, v: TorusFunction, offset: float) -> LeafRestriction:
        return LeafRestriction(
            lambda t: v(*self.leaf_point(t, offset)),
            bound=v.bound,
            label=f"{v.describe()} on leaf C={offset!r}",
        )


def torus_solve(
    v: TorusFunction,
    offset: float,
    grid,
    cfg: Optional[OperatorConfig] = None,
    flow: Optional[TorusFlow] = None,
) -> SolutionProfile:
    """
    Solve ``u + Xu = v`` along one leaf of the torus flow.

    The value at ``(x + 1, y)`` lies on the leaf with offset ``C - slope``
    at parameter ``x + 1``; the profile records the largest difference as its
    periodicity defect and raises when it exceeds ``2 epsilon``.

    Args:
        v: Torus function, 1-periodic in x.
        offset: Leaf offset ``C``.
        grid: Ascending leaf parameters ``t`` (equal to the x coordinate).
        cfg: Operator settings.
        flow: Torus foliation; defaults to slope sqrt(2).

    Returns:
        The sampled solution along the leaf.
    """
    if not isinstance(v, TorusFunction):
        raise LeafFunctionTypeError(
            f"torus_solve needs a TorusFunction periodic in x, got {type(v).__name__}"
        )
    cfg = cfg or OperatorConfig()
    flow = flow or TorusFlow()

    profile = solve_on_line(flow.restrict(v, offset), grid, cfg)
    shifted = solve_on_line(flow.restrict(v, offset - flow.slope), profile.grid + 1.0, cfg)
    defect = float(np.max(np.abs(shifted.values - profile.values)))
    if defect > 2.0 * cfg.epsilon:
        raise PeriodicityError(
            f"Torus solution differs by {defect:.3g} under x -> x + 1 (allowed {2 * cfg.epsilon:.3g})"
        )
    logger.info(f"torus_solve {v.describe()} C={offset!r}: periodicity defect {defect:.3g}")
    return replace(
        profile,
        periodicity_defect=defect,
        metadata={"offset": offset, "slope": flow.slope},
    )
