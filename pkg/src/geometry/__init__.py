from .annulus_function import AngularFactor, AnnulusFunction, AnnulusTerm
from .asymptotics import asymptotic_envelope, asymptotic_gap, circle_solve, spiral_solve
from .spiral import (
    INNER_RADIUS,
    OUTER_RADIUS,
    TWO_PI,
    InducedField,
    SpiralChart,
    cartesian_to_chart,
    chart_to_cartesian,
    induced_field_at,
    spiral_radius,
    spiral_radius_slope,
)
from .torus import TorusFlow, TorusFunction, TorusMode, torus_solve

__all__ = [
    "AngularFactor",
    "AnnulusFunction",
    "AnnulusTerm",
    "InducedField",
    "SpiralChart",
    "TorusFlow",
    "TorusFunction",
    "TorusMode",
    "INNER_RADIUS",
    "OUTER_RADIUS",
    "TWO_PI",
    "asymptotic_envelope",
    "asymptotic_gap",
    "cartesian_to_chart",
    "chart_to_cartesian",
    "circle_solve",
    "induced_field_at",
    "spiral_radius",
    "spiral_radius_slope",
    "spiral_solve",
    "torus_solve",
]
