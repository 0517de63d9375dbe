from .cover import Box, BundleCover, CocycleReport, Overlap, load_cover, verify_cocycle
from .cover_factory import CoverFactory
from .gluing import (
    AnnulusBundleReport,
    BoxSection,
    GluedSection,
    LeafContinuity,
    OverlapReport,
    annulus_bundle_solve,
    circle_bundle_solve,
    glue_general,
    trivialized_data,
)

__all__ = [
    "Box",
    "Overlap",
    "BundleCover",
    "CocycleReport",
    "load_cover",
    "verify_cocycle",
    "CoverFactory",
    "BoxSection",
    "OverlapReport",
    "GluedSection",
    "LeafContinuity",
    "AnnulusBundleReport",
    "trivialized_data",
    "glue_general",
    "circle_bundle_solve",
    "annulus_bundle_solve",
]
