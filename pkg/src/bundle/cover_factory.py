import logging
import math
from pathlib import Path

from bundle.cover import Box, BundleCover, Overlap, load_cover
from core.exceptions import ConfigurationError
from core.spec_grammar import reject_unknown, split_spec, to_float, to_int

# Configure logging
logging.basicConfig(
    level=logging.INFO, format="%(asctime)s-%(name)s-%(levelname)s-%(message)s"
)
logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
CIRCLE_WIDTH = 0.1 * math.pi
TORUS_SPLIT = 0.1
TORUS_WIDTH = 0.01
# overlap width as a fraction of the box length
OVERLAP_FRACTION = 0.1


class CoverFactory:
    """Factory for the shipped bundle covers."""

    @staticmethod
    def circle(width: float = CIRCLE_WIDTH, name: str = "circle") -> BundleCover:
        """
        Upper and lower arcs of the circle.

        The arcs meet on ``L`` near ``pi`` with ``C = 1`` and on ``R`` near
        ``0 = 2 pi`` with ``C = e^{-2 pi}``, both read from the lower arc.
        """
        if not 0.0 < width < 0.5 * math.pi:
            raise ConfigurationError(f"Circle overlap half-width must lie in (0, pi/2), got {width}")
        return BundleCover(
            name=name,
            period=TWO_PI,
            boxes=[
                Box(id="upper", start=-width, end=math.pi + width),
                Box(id="lower", start=math.pi - width, end=TWO_PI + width),
            ],
            overlaps=[
                Overlap(
                    i="lower", j="upper", start=math.pi - width, end=math.pi + width,
                    transition=1.0, label="L",
                ),
                Overlap(
                    i="lower", j="upper", start=TWO_PI - width, end=TWO_PI + width,
                    transition=math.exp(-TWO_PI), label="R",
                ),
            ],
        )

    @staticmethod
    def torus(split: float = TORUS_SPLIT, width: float = TORUS_WIDTH) -> BundleCover:
        """Two boxes over the unit circle of the torus; the wrap carries ``C = e``."""
        if not 0.0 < width < split < 1.0 - width:
            raise ConfigurationError(f"Torus cover needs 0 < width < split < 1 - width, got {split}, {width}")
        return BundleCover(
            name="torus",
            period=1.0,
            boxes=[
                Box(id="V", start=-width, end=split + width),
                Box(id="U", start=split - width, end=1.0 + width),
            ],
            overlaps=[
                Overlap(i="V", j="U", start=split - width, end=split + width, transition=1.0, label="split"),
                Overlap(i="V", j="U", start=-width, end=width, transition=math.e, label="wrap"),
            ],
        )

    @staticmethod
    def annulus() -> BundleCover:
        """Cover of a boundary circle of the annulus."""
        return CoverFactory.circle(name="annulus")

    @staticmethod
    def line(start: float = 0.0, end: float = 10.0, boxes: int = 2, shift: float = 0.0) -> BundleCover:
        """
        Consecutive boxes on a line leaf.

        Box ``m`` has offset ``m * shift``, so every overlap carries
        ``C = e^{shift}``.
        """
        if boxes < 1 or not start < end:
            raise ConfigurationError(f"Line cover needs start < end and boxes >= 1, got {start}, {end}, {boxes}")
        length = (end - start) / boxes
        half = 0.5 * OVERLAP_FRACTION * length
        box_list, overlaps = [], []
        for m in range(boxes):
            lo = start + m * length - (half if m > 0 else 0.0)
            hi = start + (m + 1) * length + (half if m < boxes - 1 else 0.0)
            box_list.append(Box(id=f"b{m}", start=lo, end=hi, offset=m * shift))
            if m > 0:
                edge = start + m * length
                overlaps.append(
                    Overlap(
                        i=f"b{m - 1}", j=f"b{m}", start=edge - half, end=edge + half,
                        transition=math.exp(shift),
                    )
                )
        return BundleCover(name="line", boxes=box_list, overlaps=overlaps)

    @staticmethod
    def single(start: float = 0.0, end: float = 10.0) -> BundleCover:
        """One box, no overlaps: the trivial bundle."""
        return BundleCover(name="single", boxes=[Box(id="b0", start=start, end=end)])

    @staticmethod
    def spiral_chain(theta_min: float, theta_max: float, width: float = CIRCLE_WIDTH) -> BundleCover:
        """
        Half-turn boxes along a spiral leaf.

        Box ``m`` covers ``[m pi - width, (m + 1) pi + width]`` and has
        offset ``-2 pi floor(m / 2)``, so each turn repeats the local
        parameters of the circle cover and crossing a full turn picks up
        ``C = e^{-2 pi}``.
        """
        if not theta_min < theta_max:
            raise ConfigurationError(f"Spiral chain needs theta_min < theta_max, got {theta_min}, {theta_max}")
        first = math.floor(theta_min / math.pi)
        last = max(first + 1, math.ceil(theta_max / math.pi))
        box_list, overlaps = [], []
        for m in range(first, last):
            box_list.append(
                Box(
                    id=f"h{m}",
                    start=m * math.pi - width,
                    end=(m + 1) * math.pi + width,
                    offset=-TWO_PI * (m // 2),
                )
            )
            if m > first:
                edge = m * math.pi
                jump = box_list[-1].offset - box_list[-2].offset
                overlaps.append(
                    Overlap(
                        i=f"h{m - 1}", j=f"h{m}", start=edge - width, end=edge + width,
                        transition=math.exp(jump),
                    )
                )
        logger.debug(f"Spiral chain over [{theta_min}, {theta_max}] with {len(box_list)} boxes")
        return BundleCover(name="spiral-chain", boxes=box_list, overlaps=overlaps)

    @staticmethod
    def create_cover(spec: str) -> BundleCover:
        """
        Build a cover from a name or a JSON file.

        Args:
            spec: ``circle``, ``torus``, ``annulus``,
                ``line[:start=,end=,boxes=,shift=]``, ``single[:start=,end=]``
                or the path of a cover description file.

        Returns:
            The cover.
        """
        if spec.strip().lower().endswith(".json") or Path(spec).is_file():
            return load_cover(spec)

        kind, params = split_spec(spec)
        if kind == "circle":
            reject_unknown(params, ("width",), kind)
            return CoverFactory.circle(to_float(params, "width", CIRCLE_WIDTH))
        if kind == "torus":
            reject_unknown(params, ("n", "width"), kind)
            return CoverFactory.torus(to_float(params, "n", TORUS_SPLIT), to_float(params, "width", TORUS_WIDTH))
        if kind == "annulus":
            reject_unknown(params, (), kind)
            return CoverFactory.annulus()
        if kind == "line":
            reject_unknown(params, ("start", "end", "boxes", "shift"), kind)
            return CoverFactory.line(
                to_float(params, "start", 0.0),
                to_float(params, "end", 10.0),
                to_int(params, "boxes", 2),
                to_float(params, "shift", 0.0),
            )
        if kind == "single":
            reject_unknown(params, ("start", "end"), kind)
            return CoverFactory.single(to_float(params, "start", 0.0), to_float(params, "end", 10.0))
        raise ConfigurationError(f"Unknown cover '{spec}'")
