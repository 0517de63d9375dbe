from .exceptions import (
    ConfigurationError,
    CoverStructureError,
    DomainError,
    EvaluationError,
    FlowEscapeError,
    FoliationError,
    IncompatibleDataError,
    LeafFunctionTypeError,
    OutOfAnnulusError,
    OutputError,
    PeriodicityError,
    SingularCoefficientError,
    VanishingFieldError,
)
from .settings_config import Settings, settings

__all__ = [
    "settings",
    "Settings",
    "FoliationError",
    "ConfigurationError",
    "DomainError",
    "EvaluationError",
    "LeafFunctionTypeError",
    "SingularCoefficientError",
    "PeriodicityError",
    "OutOfAnnulusError",
    "FlowEscapeError",
    "VanishingFieldError",
    "CoverStructureError",
    "IncompatibleDataError",
    "OutputError",
]
