import numpy as np
import pytest

from flow.flow_map import FlowMap
from flow.vector_field import FlowField, TranslationField
from solver.operator_config import OperatorConfig


@pytest.fixture
def cfg() -> OperatorConfig:
    return OperatorConfig()


@pytest.fixture
def fast_cfg() -> OperatorConfig:
    """Coarser panels; still exact to round-off for smooth data."""
    return OperatorConfig(quad_step=0.05)


@pytest.fixture
def line_grid() -> np.ndarray:
    return np.linspace(-2.0, 2.0, 401)


@pytest.fixture
def translation_flow() -> FlowMap:
    return FlowMap(FlowField(TranslationField([1.0, 0.0]), time_step=1e-2))
