import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from core.exceptions import ConfigurationError, OutputError
from solver.operator_config import OperatorConfig

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

REPORT_NAME = "report.json"


class GridSpec(BaseModel):
    """Uniform grid ``min:max:count``."""

    model_config = ConfigDict(frozen=True)

    minimum: float
    maximum: float
    count: int = Field(ge=3)

    @model_validator(mode="after")
    def _check_order(self):
        if not self.minimum < self.maximum:
            raise ValueError(f"Grid needs min < max, got {self.minimum} and {self.maximum}")
        return self

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigurationError(f"Grid must look like min:max:count, got '{text}'")
        try:
            minimum, maximum, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as e:
            raise ConfigurationError(f"Grid must look like min:max:count, got '{text}'") from e
        return cls(minimum=minimum, maximum=maximum, count=count)

    def points(self) -> np.ndarray:
        return np.linspace(self.minimum, self.maximum, self.count)

    def describe(self) -> str:
        return f"{self.minimum!r}:{self.maximum!r}:{self.count}"


class Tolerances(BaseModel):
    """Pass/fail thresholds; ``periodicity`` and ``mismatch`` default to ``2 epsilon``."""

    model_config = ConfigDict(frozen=True)

    residual: float = Field(default=1e-6, gt=0)
    periodicity: Optional[float] = Field(default=None, gt=0)
    matching: float = Field(default=1e-6, gt=0)
    mismatch: Optional[float] = Field(default=None, gt=0)
    cocycle: float = Field(default=1e-12, gt=0)
    slope: float = Field(default=0.2, gt=0)
    derivative: float = Field(default=1e-5, gt=0)

    def periodicity_for(self, cfg: OperatorConfig) -> float:
        return self.periodicity if self.periodicity is not None else 2.0 * cfg.epsilon

    def mismatch_for(self, cfg: OperatorConfig) -> float:
        return self.mismatch if self.mismatch is not None else 2.0 * cfg.epsilon


class Scenario(BaseModel):
    """Everything a run was asked to do."""

    model_config = ConfigDict(frozen=True)

    subcommand: str
    function: Optional[str] = None
    grid: Optional[GridSpec] = None
    config: OperatorConfig = Field(default_factory=OperatorConfig)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    output: str
    options: Dict[str, Any] = Field(default_factory=dict)


class Metric(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    value: float
    tolerance: Optional[float] = None

    @computed_field
    @property
    def passed(self) -> bool:
        return self.tolerance is None or self.value <= self.tolerance


class RunReport(BaseModel):
    """Scenario echo, headline metrics and the files written."""

    scenario: Scenario
    metrics: List[Metric] = Field(default_factory=list)
    files: List[str] = Field(default_factory=list)
    wall_time: float = 0.0

    @computed_field
    @property
    def passed(self) -> bool:
        return all(metric.passed for metric in self.metrics)

    @property
    def failures(self) -> List[Metric]:
        return [metric for metric in self.metrics if not metric.passed]

    def add(self, name: str, value: float, tolerance: Optional[float] = None) -> Metric:
        metric = Metric(name=name, value=float(value), tolerance=tolerance)
        self.metrics.append(metric)
        if not metric.passed:
            logger.warning(f"{name} = {metric.value:.6g} exceeds tolerance {tolerance:.3g}")
        return metric

    def write(self, directory) -> Path:
        """Write ``report.json`` into ``directory``."""
        path = Path(directory) / REPORT_NAME
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            payload = self.model_dump(mode="json")
            path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        except OSError as e:
            raise OutputError(f"Cannot write report {path}: {e}", path=str(path)) from e
        logger.info(f"Report written to {path}")
        return path
