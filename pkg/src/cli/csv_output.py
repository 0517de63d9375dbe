"""
CSV emission.

Files start with ``# columns: a,b,...`` followed by comma-separated rows in
``%.17g``, which round-trips every double exactly. Output is LF-terminated
and independent of locale, so identical runs write identical bytes.
"""

import logging
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np

from bundle.gluing import AnnulusBundleReport, GluedSection
from core.exceptions import OutputError
from singular.phi_line import PiecewiseSolution
from solver.profile import SolutionProfile

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

FORMAT = "%.17g"
HEADER_PREFIX = "columns: "


def emit_csv(columns: Sequence[str], data: Sequence, path) -> Path:
    """
    Write equally long columns to ``path``.

    Args:
        columns: Column names.
        data: One array per column.
        path: Target file; parent directories are created.

    Returns:
        The written path.
    """
    path = Path(path)
    if len(columns) != len(data):
        raise OutputError(f"{len(columns)} column names for {len(data)} columns", path=str(path))
    table = np.column_stack([np.asarray(column, dtype=float).ravel() for column in data])
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(
            path,
            table,
            fmt=FORMAT,
            delimiter=",",
            newline="\n",
            header=HEADER_PREFIX + ",".join(columns),
            comments="# ",
        )
    except OSError as e:
        raise OutputError(f"Cannot write {path}: {e}", path=str(path)) from e
    logger.debug(f"Wrote {table.shape[0]} rows to {path}")
    return path


def emit_profile(profile: SolutionProfile, path) -> Path:
    return emit_csv(("t", "u"), (profile.grid, profile.values), path)


def emit_piecewise(solution: PiecewiseSolution, path) -> Path:
    grid, values = solution.merged()
    return emit_csv(("x", "u"), (grid, values), path)


def emit_section(section: GluedSection, path) -> Path:
    """Glued ``u~`` over the base grid."""
    return emit_csv(("b", "u_tilde"), (section.base_grid, section.values), path)


def emit_annulus(report: AnnulusBundleReport, directory) -> List[Path]:
    """
    One file per spiral leaf and boundary circle, plus ``index.csv``.

    The index row ``n`` lists the label of ``spiral_n.csv`` with its gaps to
    the inner and outer circles (NaN where not measured).
    """
    directory = Path(directory)
    written = []
    labels = list(report.leaves)
    for n, s in enumerate(labels):
        section = report.leaves[s]
        written.append(emit_csv(("theta", "u_tilde"), (section.base_grid, section.values), directory / f"spiral_{n}.csv"))
    for name, section in (("inner_circle", report.inner_circle), ("outer_circle", report.outer_circle)):
        written.append(emit_csv(("theta", "u_tilde"), (section.base_grid, section.values), directory / f"{name}.csv"))
    written.append(
        emit_csv(
            ("leaf", "s", "inner_gap", "outer_gap"),
            (
                np.arange(len(labels)),
                labels,
                [report.inner_gaps.get(s, np.nan) for s in labels],
                [report.outer_gaps.get(s, np.nan) for s in labels],
            ),
            directory / "index.csv",
        )
    )
    return written


def read_csv(path) -> Tuple[List[str], np.ndarray]:
    """Column names and the 2-D table of a file written by ``emit_csv``."""
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as handle:
            header = handle.readline()
        table = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except OSError as e:
        raise OutputError(f"Cannot read {path}: {e}", path=str(path)) from e
    marker = "# " + HEADER_PREFIX
    if not header.startswith(marker):
        raise OutputError(f"{path} has no column header", path=str(path))
    return header[len(marker) :].strip().split(","), table
