from .leaf_function import (
    BaseLeafFunction,
    ConstantFunction,
    LeafFunctionKind,
    LeafRestriction,
    PolynomialFunction,
    SampledFunction,
    TrigonometricFunction,
)
from .leaf_function_factory import LeafFunctionFactory
from .line_operator import (
    ode_residual,
    solve_on_line,
    solve_periodic,
    solve_with_coefficient,
)
from .operator_config import OperatorConfig, truncation_bound
from .profile import SolutionProfile

__all__ = [
    "BaseLeafFunction",
    "ConstantFunction",
    "TrigonometricFunction",
    "PolynomialFunction",
    "SampledFunction",
    "LeafRestriction",
    "LeafFunctionKind",
    "LeafFunctionFactory",
    "OperatorConfig",
    "SolutionProfile",
    "truncation_bound",
    "solve_on_line",
    "solve_periodic",
    "solve_with_coefficient",
    "ode_residual",
]
