from .circle import CircleWeight, ObstructionReport, circle_obstruction
from .phi_line import (
    BranchProfile,
    NaiveDemo,
    NaiveDemoReport,
    PhiProfile,
    PiecewiseSolution,
    naive_singular_demos,
    singular_line_residual,
    singular_line_solve,
)

__all__ = [
    "PhiProfile",
    "BranchProfile",
    "PiecewiseSolution",
    "NaiveDemo",
    "NaiveDemoReport",
    "singular_line_solve",
    "singular_line_residual",
    "naive_singular_demos",
    "CircleWeight",
    "ObstructionReport",
    "circle_obstruction",
]
