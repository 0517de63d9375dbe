import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from bundle.cover_factory import CoverFactory
from bundle.gluing import annulus_bundle_solve, glue_general, trivialized_data
from cli.csv_output import emit_annulus, emit_csv, emit_piecewise, emit_profile, emit_section
from cli.scenario import GridSpec, RunReport, Scenario, Tolerances
from cli.verify import SUITES, run_suite
from core.exceptions import ConfigurationError, FoliationError
from core.settings_config import settings
from flow.field_solver import field_residual, solve_field_batch
from flow.flow_map import FlowMap
from flow.point_function import PointFunctionFactory
from flow.vector_field import DEFAULT_TIME_STEP, FlowField, VectorFieldFactory
from geometry.annulus_function import AnnulusFunction
from geometry.asymptotics import asymptotic_gap, spiral_solve
from geometry.torus import TorusFunction, torus_solve
from singular.circle import DEFAULT_CUTOFFS, CircleWeight, circle_obstruction
from singular.phi_line import singular_line_solve
from solver.leaf_function_factory import LeafFunctionFactory
from solver.line_operator import solve_on_line
from solver.operator_config import OperatorConfig

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

# flags whose values may start with a minus sign
VALUE_FLAGS = ("--grid", "--point", "--offset", "--s", "--s-samples", "--rate", "--modulation")

DEFAULTS = {
    "solve-line": ("const:1", "-2:2:401"),
    "solve-torus": ("torus:c=0.5,cos_1_0=1", "0:1:401"),
    "solve-spiral": ("annulus:c0=-1,c1=1,trig=cos", "-20:20:2001"),
    "solve-annulus": ("annulus:c0=-1,c1=1,trig=cos", "-20:20:201"),
    "solve-flow": ("const:1", None),
    "singular-line": ("const:1", "-50:50:10001"),
    "circle-obstruction": ("const:1", None),
    "bundle-glue": ("cos", None),
    "verify": (None, None),
}

_CONFIG_FLAGS = ("epsilon", "quad_step", "margin", "truncation")
_TOLERANCE_FLAGS = ("residual", "periodicity", "matching", "mismatch", "cocycle", "slope", "derivative")
_COMMON = {"command", "v", "grid", "output", "log_level", *_CONFIG_FLAGS, *(f"tol_{n}" for n in _TOLERANCE_FLAGS)}


def _preprocess(argv: Sequence[str]) -> List[str]:
    """Join ``--flag -value`` into ``--flag=-value`` so negative values parse."""
    out: List[str] = []
    args = list(argv)
    index = 0
    while index < len(args):
        item = args[index]
        if item in VALUE_FLAGS and index + 1 < len(args) and args[index + 1].startswith("-"):
            out.append(f"{item}={args[index + 1]}")
            index += 2
            continue
        out.append(item)
        index += 1
    return out


def _floats(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigurationError(f"Expected comma-separated numbers, got '{text}'") from e


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--v", help="Function spec, e.g. const:1 or fourier:P=6.2831853,a1=1")
    common.add_argument("--grid", help="Uniform grid min:max:count")
    common.add_argument("--output", help=f"Output directory (default {settings.output_dir})")
    common.add_argument("--log-level", help=f"Root log level (default {settings.log_level})")
    numerics = common.add_argument_group("operator settings")
    numerics.add_argument("--epsilon", type=float)
    numerics.add_argument("--quad-step", type=float)
    numerics.add_argument("--margin", type=float)
    numerics.add_argument("--truncation", type=float)
    tolerances = common.add_argument_group("tolerances")
    for name in _TOLERANCE_FLAGS:
        tolerances.add_argument(f"--tol-{name}", type=float)

    parser = argparse.ArgumentParser(
        prog="foliate", description="Solve u + Xu = v along the leaves of a foliation."
    )
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("solve-line", parents=[common], help="Solve on a line leaf")

    torus = commands.add_parser("solve-torus", parents=[common], help="Solve on a torus leaf")
    torus.add_argument("--offset", type=float, default=0.0, help="Leaf offset C in y = sqrt(2) x + C")

    spiral = commands.add_parser("solve-spiral", parents=[common], help="Solve on a spiral leaf")
    spiral.add_argument("--s", type=float, default=0.0, help="Spiral label")

    annulus = commands.add_parser("solve-annulus", parents=[common], help="Glue spirals and circles")
    annulus.add_argument("--s-samples", default="-1,0,1", help="Comma-separated spiral labels")

    flow = commands.add_parser("solve-flow", parents=[common], help="Solve along a vector field")
    flow.add_argument("--field", default="translation", help="Vector field spec")
    flow.add_argument("--point", default="0,0", help="Points 'x0,x1;x0,x1;...'")
    flow.add_argument("--time-step", type=float, default=DEFAULT_TIME_STEP)

    commands.add_parser("singular-line", parents=[common], help="Singular field on the line")

    circle = commands.add_parser("circle-obstruction", parents=[common], help="Circle obstruction")
    circle.add_argument("--cutoffs", default=",".join(str(c) for c in DEFAULT_CUTOFFS))
    circle.add_argument("--rate", type=float, default=0.0)
    circle.add_argument("--modulation", type=float, default=0.0)

    bundle = commands.add_parser("bundle-glue", parents=[common], help="Glue a section over a cover")
    bundle.add_argument("--cover", default="circle", help="circle, torus, annulus, line, single or a JSON file")

    verify = commands.add_parser("verify", parents=[common], help="Run invariant suites")
    verify.add_argument("--suite", default="all", choices=["all", *SUITES])
    return parser


Handler = Callable[[argparse.Namespace, OperatorConfig, Tolerances, RunReport, Path], List[Path]]


def _grid(args: argparse.Namespace) -> Optional[np.ndarray]:
    text = args.grid or DEFAULTS[args.command][1]
    return GridSpec.parse(text).points() if text else None


def _solve_line(args, cfg, tol, report, output) -> List[Path]:
    v = LeafFunctionFactory.create_leaf_function(args.v)
    profile = solve_on_line(v, _grid(args), cfg)
    report.add("residual_sup", profile.residual_sup, tol.residual)
    report.add("truncation", profile.truncation)
    return [emit_profile(profile, output / "profile.csv")]


def _solve_torus(args, cfg, tol, report, output) -> List[Path]:
    v = TorusFunction.from_spec(args.v)
    profile = torus_solve(v, args.offset, _grid(args), cfg)
    report.add("residual_sup", profile.residual_sup, tol.residual)
    report.add("periodicity_defect", profile.periodicity_defect, tol.periodicity_for(cfg))
    return [emit_profile(profile, output / "profile.csv")]


def _solve_spiral(args, cfg, tol, report, output) -> List[Path]:
    v = AnnulusFunction.from_spec(args.v)
    grid = _grid(args)
    profile = spiral_solve(v, args.s, grid, cfg)
    report.add("residual_sup", profile.residual_sup, tol.residual)
    if grid[0] <= 0:
        report.add("inner_gap", asymptotic_gap(v, args.s, float(grid[0]), cfg))
    if grid[-1] > 0:
        report.add("outer_gap", asymptotic_gap(v, args.s, float(grid[-1]), cfg))
    return [emit_profile(profile, output / "profile.csv")]


def _solve_annulus(args, cfg, tol, report, output) -> List[Path]:
    v = AnnulusFunction.from_spec(args.v)
    result = annulus_bundle_solve(v, _floats(args.s_samples), _grid(args), cfg)
    report.add("max_mismatch", result.max_mismatch, tol.mismatch_for(cfg))
    report.add("max_asymptotic_gap", result.max_gap)
    for item in result.continuity:
        report.add(f"leaf_delta[{item.first:g},{item.second:g}]", item.delta)
    return emit_annulus(result, output)


def _solve_flow(args, cfg, tol, report, output) -> List[Path]:
    points = np.array([_floats(chunk) for chunk in args.point.split(";") if chunk.strip()])
    if points.ndim != 2 or points.shape[0] == 0:
        raise ConfigurationError(f"Points must share one dimension, got '{args.point}'")
    dimension = points.shape[1]
    V = PointFunctionFactory.create_point_function(args.v, dimension)
    field = FlowField(
        VectorFieldFactory.create_vector_field(args.field, dimension),
        region=VectorFieldFactory.default_region(args.field, dimension),
        time_step=args.time_step,
    )
    flow_map = FlowMap(field)
    values = solve_field_batch(V, points, flow_map, cfg)
    residual = max(field_residual(V, point, flow_map, cfg) for point in points)
    report.add("field_residual", residual, tol.residual)
    columns = [f"x{k}" for k in range(dimension)] + ["U"]
    return [emit_csv(columns, [*points.T, values], output / "field.csv")]


def _singular_line(args, cfg, tol, report, output) -> List[Path]:
    v = LeafFunctionFactory.create_leaf_function(args.v)
    solution = singular_line_solve(v, _grid(args), cfg)
    report.add("sup_abs", solution.sup_abs, 3.0 * v.bound + 1e-6)
    for name, gap in solution.junction_gaps.items():
        report.add(f"junction_gap[{name}]", gap, tol.matching)
    if solution.residual_sup is not None:
        report.add("residual_sup", solution.residual_sup)
    return [emit_piecewise(solution, output / "solution.csv")]


def _circle_obstruction(args, cfg, tol, report, output) -> List[Path]:
    v = LeafFunctionFactory.create_leaf_function(args.v)
    weight = CircleWeight(rate=args.rate, modulation=args.modulation)
    result = circle_obstruction(v, weight, _floats(args.cutoffs), cfg)
    report.add("defect", result.defect)
    report.add("divergent", float(result.divergent))
    if result.divergent:
        report.add("slope_error", max(result.slope_errors), tol.slope)
    arcs = [*result.upper_arc, *result.lower_arc]
    return [
        emit_csv(("theta", "u"), ([a for a, _ in arcs], [b for _, b in arcs]), output / "arcs.csv"),
        emit_csv(
            ("eta", "upper", "lower", "defect"),
            (result.cutoffs, result.upper, result.lower, result.defects),
            output / "cutoffs.csv",
        ),
    ]


def _bundle_glue(args, cfg, tol, report, output) -> List[Path]:
    cover = CoverFactory.create_cover(args.cover)
    v = LeafFunctionFactory.create_leaf_function(args.v)
    section = glue_general(cover, trivialized_data(cover, v), cfg, _grid(args))
    report.add("cocycle_deviation", section.cocycle.deviation, tol.cocycle)
    report.add("max_mismatch", section.max_mismatch, tol.mismatch_for(cfg))
    report.add("fiber_deviation", section.max_fiber_deviation)
    if section.periodicity_defect is not None:
        report.add("periodicity_defect", section.periodicity_defect, tol.periodicity_for(cfg))
    for name, value in section.cocycle.holonomy.items():
        report.add(f"holonomy[{name}]", value)
    return [emit_section(section, output / "section.csv")]


def _verify(args, cfg, tol, report, output) -> List[Path]:
    run_suite(args.suite, report, cfg)
    return []


HANDLERS: Dict[str, Handler] = {
    "solve-line": _solve_line,
    "solve-torus": _solve_torus,
    "solve-spiral": _solve_spiral,
    "solve-annulus": _solve_annulus,
    "solve-flow": _solve_flow,
    "singular-line": _singular_line,
    "circle-obstruction": _circle_obstruction,
    "bundle-glue": _bundle_glue,
    "verify": _verify,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand.

    Args:
        argv: Arguments without the program name; defaults to ``sys.argv[1:]``.

    Returns:
        0 when every declared tolerance passes, 1 on a failed tolerance or a
        module error, 2 on a usage error.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(_preprocess(sys.argv[1:] if argv is None else argv))
    except SystemExit as e:
        return int(e.code or 0)

    settings.apply_log_level(args.log_level)
    if args.v is None:
        args.v = DEFAULTS[args.command][0]
    output = Path(args.output or settings.output_dir)
    started = time.perf_counter()
    try:
        cfg = OperatorConfig(
            **{name: getattr(args, name) for name in _CONFIG_FLAGS if getattr(args, name) is not None}
        )
        tolerances = Tolerances(
            **{name: getattr(args, f"tol_{name}") for name in _TOLERANCE_FLAGS if getattr(args, f"tol_{name}") is not None}
        )
        scenario = Scenario(
            subcommand=args.command,
            function=args.v,
            grid=GridSpec.parse(args.grid) if args.grid else None,
            config=cfg,
            tolerances=tolerances,
            output=str(output),
            options={k: v for k, v in vars(args).items() if k not in _COMMON and v is not None},
        )
        report = RunReport(scenario=scenario)
        files = HANDLERS[args.command](args, cfg, tolerances, report, output)
        report.files = [str(path) for path in files]
        report.wall_time = time.perf_counter() - started
        report.write(output)
    except (FoliationError, ValidationError) as e:
        logger.exception(f"{args.command} failed: {e}")
        return 1

    if report.passed:
        logger.info(f"{args.command} passed in {report.wall_time:.2f}s")
        return 0
    logger.error(f"{args.command} failed: {', '.join(m.name for m in report.failures)}")
    return 1


def main() -> None:
    sys.exit(run())
