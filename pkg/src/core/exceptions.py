"""Exception hierarchy shared by every foliate package."""

from typing import Optional, Sequence


class FoliationError(Exception):
    """Base class for errors raised while building or solving on a foliation."""


class ConfigurationError(FoliationError, ValueError):
    """Invalid configuration, grid or catalog specification."""


class DomainError(FoliationError, ValueError):
    """An argument lies outside the domain of an operation."""


class EvaluationError(FoliationError, ArithmeticError):
    """A function produced a non-finite value."""

    def __init__(self, message: str, point: Optional[object] = None):
        super().__init__(message)
        self.point = point


class LeafFunctionTypeError(FoliationError, TypeError):
    """The function kind does not support the requested operation."""


class SingularCoefficientError(FoliationError, ValueError):
    """A coefficient fell below its positive floor."""


class PeriodicityError(FoliationError, ArithmeticError):
    """A solution failed its periodicity assertion."""


class OutOfAnnulusError(DomainError):
    """A point lies on or outside the bounding circles of the annulus."""


class FlowEscapeError(FoliationError, RuntimeError):
    """An integral curve left the working region."""

    def __init__(
        self,
        message: str,
        exit_time: float,
        point: Optional[Sequence[float]] = None,
    ):
        super().__init__(message)
        self.exit_time = exit_time
        self.point = point


class VanishingFieldError(FoliationError, ValueError):
    """The vector field drops below its nonvanishing floor."""


class CoverStructureError(FoliationError, ValueError):
    """A bundle cover is malformed or fails its cocycle conditions."""


class IncompatibleDataError(FoliationError, ValueError):
    """Local data disagree on an overlap in the trivialized frame."""

    def __init__(self, message: str, overlap: str):
        super().__init__(message)
        self.overlap = overlap


class OutputError(FoliationError, OSError):
    """Writing a result file failed."""

    def __init__(self, message: str, path: str):
        super().__init__(message)
        self.path = path
