from .field_solver import (
    ContinuityReport,
    OrderAgreement,
    PairContinuity,
    SmoothnessReport,
    continuity_check,
    field_residual,
    smoothness_order_check,
    solve_field,
    solve_field_batch,
    solve_field_derivative,
)
from .flow_map import FlowMap
from .point_function import (
    AnnulusPointFunction,
    BasePointFunction,
    ConstantPointFunction,
    LinearPointFunction,
    PointFunctionFactory,
    SinePointFunction,
)
from .region import AnnulusRegion, BoxRegion, WorkingRegion, default_box
from .vector_field import (
    BaseVectorField,
    FlowField,
    RotationField,
    SpiralField,
    TranslationField,
    UnitSpeedField,
    VectorFieldFactory,
)

__all__ = [
    "AnnulusRegion",
    "BoxRegion",
    "WorkingRegion",
    "default_box",
    "BasePointFunction",
    "ConstantPointFunction",
    "LinearPointFunction",
    "SinePointFunction",
    "AnnulusPointFunction",
    "PointFunctionFactory",
    "BaseVectorField",
    "TranslationField",
    "RotationField",
    "SpiralField",
    "UnitSpeedField",
    "FlowField",
    "VectorFieldFactory",
    "FlowMap",
    "solve_field",
    "solve_field_batch",
    "solve_field_derivative",
    "smoothness_order_check",
    "field_residual",
    "continuity_check",
    "OrderAgreement",
    "SmoothnessReport",
    "PairContinuity",
    "ContinuityReport",
]
