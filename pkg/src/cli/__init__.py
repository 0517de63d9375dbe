from .cli import build_parser, main, run
from .csv_output import emit_annulus, emit_csv, emit_piecewise, emit_profile, emit_section, read_csv
from .scenario import GridSpec, Metric, RunReport, Scenario, Tolerances
from .verify import SUITES, run_suite

__all__ = [
    "run",
    "main",
    "build_parser",
    "emit_csv",
    "emit_profile",
    "emit_piecewise",
    "emit_section",
    "emit_annulus",
    "read_csv",
    "GridSpec",
    "Tolerances",
    "Scenario",
    "Metric",
    "RunReport",
    "SUITES",
    "run_suite",
]
