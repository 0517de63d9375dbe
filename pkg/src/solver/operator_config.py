import logging
import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from core.exceptions import DomainError

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)


def truncation_bound(bound: float, epsilon: float) -> float:
    """
    Tail-cut depth ``ln(4M / epsilon)`` for the weighted integral.

    Beyond this depth the discarded tail of ``int e^{-s} v`` is below
    ``epsilon / 4`` of what the operator keeps. Callers add their margin.

    Args:
        bound: Sup-norm bound ``M > 0`` of the integrand.
        epsilon: Target truncation error ``> 0``.

    Returns:
        The depth ``ln(4M / epsilon)``; it may be zero or negative.
    """
    for name, value in (("bound", bound), ("epsilon", epsilon)):
        if not math.isfinite(value) or value <= 0:
            raise DomainError(f"truncation_bound needs {name} > 0, got {value}")
    return math.log(4.0 * bound / epsilon)


class OperatorConfig(BaseModel):
    """Numerical settings of the weighted-integral solution operator."""

    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(default=1e-9, gt=0, description="Target truncation error.")
    quad_step: float = Field(default=1e-2, gt=0, description="Largest quadrature panel.")
    margin: float = Field(default=2.0, ge=0, description="Added to the truncation bound.")
    truncation: Optional[float] = Field(
        default=None, gt=0, description="Explicit truncation L; derived when unset."
    )
    coefficient_floor: float = Field(
        default=1e-6, gt=0, description="Smallest admissible coefficient A(x)."
    )

    def truncation_length(self, bound: float) -> float:
        """
        Truncation ``L`` used for an integrand bounded by ``bound``.

        A zero bound is treated as ``epsilon / 4`` so ``L`` reduces to the margin,
        never shorter than two quadrature panels.
        """
        derived = truncation_bound(max(bound, self.epsilon / 4.0), self.epsilon) + self.margin
        derived = max(derived, 2.0 * self.quad_step)
        if self.truncation is None:
            return derived
        if self.truncation < derived:
            logger.warning(
                f"Truncation override L={self.truncation} is below the derived {derived:.6g}"
            )
        return self.truncation

    def with_truncation(self, truncation: float) -> "OperatorConfig":
        return self.model_copy(update={"truncation": truncation})
