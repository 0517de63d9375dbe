import logging
from enum import Enum
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from core.exceptions import ConfigurationError
from core.spec_grammar import split_spec, to_float, to_int
from geometry.spiral import INNER_RADIUS, OUTER_RADIUS, TWO_PI, spiral_radius
from solver.leaf_function import LeafRestriction, TrigonometricFunction

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)


class AngularFactor(str, Enum):
    ONE = "one"
    COS = "cos"
    SIN = "sin"


class AnnulusTerm(BaseModel):
    """``p(r) * g(k theta)`` with ``p`` a polynomial (ascending coefficients)."""

    model_config = ConfigDict(frozen=True)

    radial: Tuple[float, ...] = (1.0,)
    angular: AngularFactor = AngularFactor.ONE
    frequency: int = Field(default=1, ge=1)

    @field_validator("radial")
    @classmethod
    def _non_empty(cls, value):
        if len(value) == 0:
            raise ValueError("radial polynomial needs at least one coefficient")
        return value

    @property
    def polynomial(self) -> np.polynomial.Polynomial:
        return np.polynomial.Polynomial(np.asarray(self.radial, dtype=float))

    def radial_sup(self) -> float:
        """Sup of ``|p|`` on the closed annulus ``1 <= r <= 2``."""
        p = self.polynomial
        candidates = [INNER_RADIUS, OUTER_RADIUS]
        if p.degree() > 1:
            for root in np.atleast_1d(p.deriv().roots()):
                if abs(root.imag) < 1e-12 and INNER_RADIUS < root.real < OUTER_RADIUS:
                    candidates.append(float(root.real))
        return float(np.max(np.abs(p(np.asarray(candidates)))))

    def angular_values(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.angular is AngularFactor.COS:
            return np.cos(self.frequency * theta)
        if self.angular is AngularFactor.SIN:
            return np.sin(self.frequency * theta)
        return np.ones_like(theta)

    def angular_derivative(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        k = self.frequency
        if self.angular is AngularFactor.COS:
            return -k * np.sin(k * theta)
        if self.angular is AngularFactor.SIN:
            return k * np.cos(k * theta)
        return np.zeros_like(theta)


class AnnulusFunction(BaseModel):
    """
    Continuous function on the closed annulus built from catalog terms.

    Each term is a polynomial in ``r`` times ``1``, ``cos(k theta)`` or
    ``sin(k theta)``, so ``v`` is continuous up to both boundary circles.
    """

    model_config = ConfigDict(frozen=True)

    terms: List[AnnulusTerm] = Field(default_factory=list)

    @property
    def bound(self) -> float:
        return sum(term.radial_sup() for term in self.terms)

    def __call__(self, r, theta) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(np.broadcast(r, theta).shape)
        for term in self.terms:
            out = out + term.polynomial(r) * term.angular_values(theta)
        return out

    def partials(self, r, theta) -> Tuple[np.ndarray, np.ndarray]:
        """``(dv/dr, dv/dtheta)``."""
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        shape = np.broadcast(r, theta).shape
        d_r, d_theta = np.zeros(shape), np.zeros(shape)
        for term in self.terms:
            p = term.polynomial
            d_r = d_r + p.deriv()(r) * term.angular_values(theta)
            d_theta = d_theta + p(r) * term.angular_derivative(theta)
        return d_r, d_theta

    def circle_restriction(self, radius: float) -> TrigonometricFunction:
        """``theta -> v(radius, theta)`` as a 2 pi-periodic catalog function."""
        if radius not in (INNER_RADIUS, OUTER_RADIUS):
            raise ConfigurationError(f"Boundary circles have radius 1 or 2, got {radius}")
        constant = 0.0
        size = max([1, *(term.frequency for term in self.terms)])
        cosines, sines = np.zeros(size), np.zeros(size)
        for term in self.terms:
            weight = float(term.polynomial(radius))
            if term.angular is AngularFactor.ONE:
                constant += weight
            elif term.angular is AngularFactor.COS:
                cosines[term.frequency - 1] += weight
            else:
                sines[term.frequency - 1] += weight
        return TrigonometricFunction(TWO_PI, constant=constant, cosines=cosines, sines=sines)

    def spiral_restriction(self, s: float) -> LeafRestriction:
        """``theta -> v(r(theta, s), theta)`` along the spiral leaf ``s``."""
        return LeafRestriction(
            lambda theta: self(spiral_radius(theta, s), theta),
            bound=self.bound,
            label=f"{self.describe()} on spiral s={s!r}",
        )

    def describe(self) -> str:
        pieces = []
        for term in self.terms:
            parts = [f"c{k}={c!r}" for k, c in enumerate(term.radial)]
            parts.append(f"trig={term.angular.value}")
            if term.angular is not AngularFactor.ONE:
                parts.append(f"k={term.frequency}")
            pieces.append(",".join(parts))
        return "annulus:" + "+".join(pieces)

    @classmethod
    def from_spec(cls, spec: str) -> "AnnulusFunction":
        """
        Parse ``annulus:c0=,c1=,trig=cos,k=1+c0=...`` or ``const:c``.

        ``annulus:c0=-1,c1=1,trig=cos`` is ``(r - 1) cos(theta)``.
        """
        kind, _, body = spec.strip().partition(":")
        kind = kind.strip().lower()
        if kind == "const":
            _, params = split_spec(spec)
            value = to_float(params, "value" if "value" in params else "c", 0.0)
            return cls(terms=[AnnulusTerm(radial=(value,))])
        if kind != "annulus":
            raise ConfigurationError(f"Unknown annulus function kind '{kind}'")

        terms = []
        for piece in body.split("+"):
            _, params = split_spec(f"term:{piece}")
            trig = params.pop("trig", "one")
            frequency = to_int(params, "k", 1)
            params.pop("k", None)
            coefficients: dict[int, float] = {}
            for key in params:
                if not (key.startswith("c") and key[1:].isdigit()):
                    raise ConfigurationError(f"Unknown parameter '{key}' for kind 'annulus'")
                coefficients[int(key[1:])] = to_float(params, key)
            if not coefficients:
                raise ConfigurationError(f"Annulus term '{piece}' has no radial coefficients")
            try:
                angular = AngularFactor(trig)
            except ValueError as e:
                raise ConfigurationError(f"Unknown angular factor '{trig}'") from e
            degree = max(coefficients)
            terms.append(
                AnnulusTerm(
                    radial=tuple(coefficients.get(k, 0.0) for k in range(degree + 1)),
                    angular=angular,
                    frequency=frequency,
                )
            )
        logger.debug(f"Parsed annulus function with {len(terms)} term(s)")
        return cls(terms=terms)
