"""Named invariant batteries run by ``foliate verify``."""

import logging
import math
from typing import Callable, Dict, List, Tuple

import numpy as np

from bundle.cover import Box, BundleCover, Overlap, verify_cocycle
from bundle.cover_factory import CoverFactory
from bundle.gluing import circle_bundle_solve
from cli.scenario import RunReport
from core.exceptions import ConfigurationError
from flow.field_solver import solve_field, solve_field_derivative
from flow.flow_map import FlowMap
from flow.point_function import PointFunctionFactory
from flow.vector_field import FlowField, VectorFieldFactory
from geometry.annulus_function import AnnulusFunction
from geometry.asymptotics import asymptotic_envelope, spiral_solve
from geometry.spiral import cartesian_to_chart, chart_to_cartesian
from geometry.torus import TorusFunction, torus_solve
from singular.circle import circle_obstruction
from singular.phi_line import singular_line_solve
from solver.leaf_function import ConstantFunction
from solver.leaf_function_factory import LeafFunctionFactory
from solver.line_operator import solve_on_line, solve_periodic
from solver.operator_config import OperatorConfig

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

Check = Callable[[OperatorConfig], List[Tuple[str, float, float]]]

LINE_GRID = np.linspace(-2.0, 2.0, 401)
CATALOG = ("const:1", "sin", "cos", "poly:c0=1,c1=-0.5,c2=0.25,c3=-0.1,lo=-3,hi=3", "fourier:P=6.283185307179586,a0=0.5,a1=1,b2=0.5")
ASYMPTOTIC_FIXTURE = "annulus:c0=-1,c1=1,trig=cos"


def _operator_checks(cfg: OperatorConfig) -> List[Tuple[str, float, float]]:
    results = []
    one = solve_on_line(ConstantFunction(1.0), LINE_GRID, cfg)
    results.append(("operator.constant_absorption", float(np.max(np.abs(one.values - 1.0))), 1e-9))

    for spec in CATALOG:
        v = LeafFunctionFactory.create_leaf_function(spec)
        profile = solve_on_line(v, LINE_GRID, cfg)
        results.append((f"operator.residual[{spec}]", profile.residual_sup, 1e-6))
        deeper = solve_on_line(v, LINE_GRID, cfg.with_truncation(2.0 * profile.truncation))
        results.append(
            (f"operator.truncation[{spec}]", float(np.max(np.abs(deeper.values - profile.values))), 0.5 * cfg.epsilon)
        )

    cosine = LeafFunctionFactory.create_leaf_function("cos")
    closed = solve_on_line(cosine, LINE_GRID, cfg)
    expected = 0.5 * (np.cos(LINE_GRID) + np.sin(LINE_GRID))
    results.append(("operator.cosine_closed_form", float(np.max(np.abs(closed.values - expected))), 2.0 * cfg.epsilon))

    theta = np.linspace(0.0, 2.0 * math.pi, 129)[:-1]
    periodic = solve_periodic(cosine, theta, cfg)
    results.append(("operator.periodic_defect", periodic.periodicity_defect, 2.0 * cfg.epsilon))
    return results


def _geometry_checks(cfg: OperatorConfig) -> List[Tuple[str, float, float]]:
    results = []
    torus_v = TorusFunction.from_spec("torus:c=0.5,cos_1_0=1,sin_1_1=0.5")
    profile = torus_solve(torus_v, 0.25, np.linspace(0.0, 1.0, 101), cfg)
    results.append(("geometry.torus_periodicity", profile.periodicity_defect, 2.0 * cfg.epsilon))

    thetas, labels = np.meshgrid(
        np.linspace(-6.0 * math.pi, 6.0 * math.pi, 100), np.linspace(-3.0, 3.0, 100)
    )
    back_theta, back_s = cartesian_to_chart(*chart_to_cartesian(thetas, labels))
    drift = max(float(np.max(np.abs(back_theta - thetas))), float(np.max(np.abs(back_s - labels))))
    results.append(("geometry.chart_round_trip", drift, 1e-10))

    constant = AnnulusFunction.from_spec("const:1")
    spiral = spiral_solve(constant, 0.0, np.linspace(-20.0, 20.0, 201), cfg)
    results.append(("geometry.spiral_constant", float(np.max(np.abs(spiral.values - 1.0))), 1e-9))

    fixture = AnnulusFunction.from_spec(ASYMPTOTIC_FIXTURE)
    envelopes = [asymptotic_envelope(fixture, 0.0, theta, cfg) for theta in (-5.0, -10.0, -15.0, -20.0)]
    rises = max(later - earlier for earlier, later in zip(envelopes, envelopes[1:]))
    results.append(("geometry.envelope_decreasing", max(rises, 0.0), 0.0))
    return results


def _flow_checks(cfg: OperatorConfig) -> List[Tuple[str, float, float]]:
    results = []
    spec = "translation:d0=1,d1=0.5"
    field = FlowField(VectorFieldFactory.create_vector_field(spec, 2), time_step=1e-2)
    flow_map = FlowMap(field)
    x = np.array([0.3, -0.2])

    constant = PointFunctionFactory.create_point_function("const:1", 2)
    results.append(("flow.constant_absorption", abs(solve_field(constant, x, flow_map, cfg) - 1.0), 1e-9))

    sine = PointFunctionFactory.create_point_function("sin:axis=0,k=3", 2)
    h = 1e-4
    unit = np.array([h, 0.0])
    fd = (solve_field(sine, x + unit, flow_map, cfg) - solve_field(sine, x - unit, flow_map, cfg)) / (2.0 * h)
    derivative = solve_field_derivative(sine, x, 0, flow_map, cfg)
    results.append(("flow.derivative_agreement", abs(derivative - fd), 1e-5))

    results.append(("flow.semigroup", flow_map.semigroup_defect(x, 0.7, -1.3), 1e-10))
    return results


def _singular_checks(cfg: OperatorConfig) -> List[Tuple[str, float, float]]:
    results = []
    grid = np.union1d(np.linspace(-50.0, 50.0, 10001), [-1e-6, 1e-6])
    solution = singular_line_solve(ConstantFunction(1.0), grid, cfg)
    results.append(("singular.sup_bound", solution.sup_abs, 3.0 + 1e-6))
    results.append(("singular.junction_gaps", max(solution.junction_gaps.values()), 1e-6))
    near_zero = max(abs(solution.u1.at(1e-6) - 1.0), abs(solution.u3.at(-1e-6) - 1.0))
    results.append(("singular.limit_at_zero", near_zero, 1e-5))

    zero = circle_obstruction(ConstantFunction(0.0), cfg=cfg)
    results.append(("singular.circle_zero_defect", zero.defect, 1e-12))
    one = circle_obstruction(ConstantFunction(1.0), cfg=cfg)
    results.append(("singular.circle_slope", max(one.slope_errors), 0.2))
    return results


def inconsistent_cover() -> BundleCover:
    """Three boxes sharing a point with ``C12 = 2``, ``C23 = 3``, ``C13 = 5``."""
    return BundleCover(
        name="inconsistent",
        boxes=[
            Box(id="1", start=0.0, end=1.0),
            Box(id="2", start=0.4, end=1.4),
            Box(id="3", start=0.3, end=2.0),
        ],
        overlaps=[
            Overlap(i="1", j="2", start=0.4, end=1.0, transition=2.0),
            Overlap(i="2", j="3", start=0.4, end=1.4, transition=3.0),
            Overlap(i="1", j="3", start=0.3, end=1.0, transition=5.0),
        ],
    )


def _bundle_checks(cfg: OperatorConfig) -> List[Tuple[str, float, float]]:
    results = []
    for cover in (CoverFactory.circle(), CoverFactory.torus(), CoverFactory.annulus()):
        results.append((f"bundle.cocycle[{cover.name}]", verify_cocycle(cover).deviation, 1e-12))
    flagged = not verify_cocycle(inconsistent_cover()).consistent
    results.append(("bundle.inconsistent_fixture_flagged", 0.0 if flagged else 1.0, 0.0))

    section = circle_bundle_solve(LeafFunctionFactory.create_leaf_function("cos"), cfg)
    results.append(("bundle.circle_mismatch", section.max_mismatch, 2.0 * cfg.epsilon))
    results.append(("bundle.circle_periodicity", section.periodicity_defect, 2.0 * cfg.epsilon))
    results.append(("bundle.circle_fiber_relation", section.max_fiber_deviation, 1e-12))
    return results


SUITES: Dict[str, Check] = {
    "operator": _operator_checks,
    "geometry": _geometry_checks,
    "flow": _flow_checks,
    "singular": _singular_checks,
    "bundle": _bundle_checks,
}


def run_suite(suite: str, report: RunReport, cfg: OperatorConfig) -> RunReport:
    """
    Run one battery, or all of them for ``suite == "all"``, into ``report``.

    Every failing invariant is logged by name.
    """
    if suite == "all":
        names = list(SUITES)
    elif suite in SUITES:
        names = [suite]
    else:
        raise ConfigurationError(f"Unknown suite '{suite}'; choose from all, {', '.join(SUITES)}")

    for name in names:
        logger.info(f"Running {name} invariants")
        for metric_name, value, tolerance in SUITES[name](cfg):
            report.add(metric_name, value, tolerance)

    for metric in report.failures:
        logger.error(f"FAILED {metric.name}: {metric.value:.6g} > {metric.tolerance:.3g}")
    return report
