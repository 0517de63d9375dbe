import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from bundle.cover import Box, BundleCover, Overlap, load_cover, verify_cocycle
from bundle.cover_factory import CoverFactory
from bundle.gluing import (
    annulus_bundle_solve,
    circle_bundle_solve,
    glue_general,
    trivialized_data,
)
from cli.verify import inconsistent_cover
from core.exceptions import (
    ConfigurationError,
    CoverStructureError,
    IncompatibleDataError,
    LeafFunctionTypeError,
)
from geometry.annulus_function import AnnulusFunction
from solver.leaf_function import ConstantFunction
from solver.leaf_function_factory import LeafFunctionFactory
from solver.line_operator import solve_on_line

TWO_PI = 2.0 * math.pi


class TestCocycle:
    """Transition constants must satisfy ``C_ij C_jk = C_ik`` where boxes meet."""

    @pytest.mark.parametrize(
        "cover",
        [CoverFactory.circle(), CoverFactory.torus(), CoverFactory.annulus(), CoverFactory.line(boxes=4, shift=0.3)],
        ids=lambda cover: cover.name,
    )
    def test_shipped_covers_are_consistent(self, cover):
        report = verify_cocycle(cover)
        assert report.consistent
        assert report.deviation <= 1e-12

    def test_inconsistent_fixture_is_flagged(self):
        report = verify_cocycle(inconsistent_cover())
        assert not report.consistent
        assert report.triples_checked == 1
        assert report.triple_deviation == pytest.approx(1.0)
        assert report.failures

    def test_holonomy_of_closed_covers(self):
        assert verify_cocycle(CoverFactory.circle()).holonomy == {"R": pytest.approx(math.exp(-TWO_PI))}
        assert verify_cocycle(CoverFactory.torus()).holonomy == {"wrap": pytest.approx(math.e)}

    def test_identity_and_inverse(self):
        cover = BundleCover(
            boxes=[Box(id="a", start=0.0, end=1.0), Box(id="b", start=0.5, end=2.0)],
            overlaps=[
                Overlap(i="a", j="a", start=0.0, end=1.0, transition=1.5),
                Overlap(i="a", j="b", start=0.5, end=1.0, transition=2.0),
                Overlap(i="b", j="a", start=0.5, end=1.0, transition=0.25),
            ],
        )
        report = verify_cocycle(cover)
        assert report.identity_deviation == pytest.approx(0.5)
        assert report.inverse_deviation == pytest.approx(0.5)
        assert len(report.failures) >= 2

    def test_missing_transition(self):
        cover = BundleCover(
            boxes=[Box(id="a", start=0.0, end=1.0), Box(id="b", start=0.5, end=2.0)],
            overlaps=[Overlap(i="a", j="b", start=0.5, end=1.0)],
        )
        with pytest.raises(CoverStructureError):
            verify_cocycle(cover)

    def test_expected_transitions_follow_offsets(self):
        cover = CoverFactory.spiral_chain(-7.0, 7.0)
        for overlap in cover.overlaps:
            assert overlap.transition == pytest.approx(cover.expected_transition(overlap))
        assert verify_cocycle(cover).consistent


class TestCoverModel:
    def test_unknown_box_reference(self):
        with pytest.raises(ValidationError):
            BundleCover(boxes=[Box(id="a", start=0.0, end=1.0)], overlaps=[Overlap(i="a", j="z", start=0.0, end=1.0)])

    def test_duplicate_ids(self):
        with pytest.raises(ValidationError):
            BundleCover(boxes=[Box(id="a", start=0.0, end=1.0), Box(id="a", start=1.0, end=2.0)])

    def test_empty_box(self):
        with pytest.raises(ValidationError):
            Box(id="a", start=1.0, end=1.0)

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "cover.json"
        path.write_text(CoverFactory.torus().model_dump_json(), encoding="utf-8")
        assert load_cover(path) == CoverFactory.torus()
        assert CoverFactory.create_cover(str(path)).name == "torus"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_cover(tmp_path / "absent.json")

    @pytest.mark.parametrize("spec", ["moebius", "line:boxes=0", "circle:width=3", "torus:n=2"])
    def test_bad_cover_specs(self, spec):
        with pytest.raises(ConfigurationError):
            CoverFactory.create_cover(spec)

    def test_representative_wraps_period(self):
        cover = CoverFactory.circle()
        assert cover.representative(TWO_PI + 0.5, cover.box("upper")) == pytest.approx(0.5)
        assert cover.representative(0.5, cover.box("lower")) is None


class TestGlueGeneral:
    """Trivialized solves on boxes agree on every overlap."""

    def test_single_box_is_the_line_solver(self, cfg, line_grid):
        v = LeafFunctionFactory.create_leaf_function("sin")
        cover = CoverFactory.single(-2.0, 2.0)
        section = glue_general(cover, trivialized_data(cover, v), cfg, line_grid)
        assert_allclose(section.values, solve_on_line(v, line_grid, cfg).values, atol=1e-12)
        assert section.overlaps == ()
        assert section.periodicity_defect is None

    def test_shifted_frames_glue(self, cfg):
        cover = CoverFactory.line(-2.0, 2.0, boxes=3, shift=0.7)
        v = LeafFunctionFactory.create_leaf_function("sin")
        grid = np.linspace(-2.0, 2.0, 81)
        section = glue_general(cover, trivialized_data(cover, v), cfg, grid)
        assert section.max_mismatch <= 2.0 * cfg.epsilon
        assert section.max_fiber_deviation <= 1e-10
        assert_allclose(section.values, 0.5 * (np.sin(grid) - np.cos(grid)), atol=2e-9)
        for report in section.overlaps:
            assert report.transition == pytest.approx(math.exp(0.7))
            assert report.data_mismatch <= 1e-12

    def test_frame_values_round_trip(self, fast_cfg):
        cover = CoverFactory.line(0.0, 4.0, boxes=2, shift=1.0)
        section = glue_general(cover, trivialized_data(cover, ConstantFunction(1.0)), fast_cfg)
        box = section.section("b1")
        assert_allclose(box.trivialize(box.frame_values()), box.trivialized, rtol=1e-14)
        assert_allclose(box.local_grid, box.base_grid + 1.0)

    def test_incompatible_data(self, cfg):
        cover = CoverFactory.line(0.0, 4.0, boxes=2)
        local = {
            "b0": LeafFunctionFactory.create_leaf_function("sin"),
            "b1": LeafFunctionFactory.create_leaf_function("cos"),
        }
        with pytest.raises(IncompatibleDataError) as excinfo:
            glue_general(cover, local, cfg)
        assert excinfo.value.overlap == cover.overlaps[0].name

    def test_missing_box_data(self, cfg):
        cover = CoverFactory.line(0.0, 4.0, boxes=2)
        with pytest.raises(CoverStructureError):
            glue_general(cover, {"b0": ConstantFunction(1.0)}, cfg)

    def test_transition_must_follow_offsets(self, cfg):
        cover = BundleCover(
            boxes=[Box(id="a", start=0.0, end=1.0), Box(id="b", start=0.9, end=2.0)],
            overlaps=[Overlap(i="a", j="b", start=0.9, end=1.0, transition=2.0)],
        )
        with pytest.raises(CoverStructureError):
            glue_general(cover, trivialized_data(cover, ConstantFunction(1.0)), cfg)

    def test_inconsistent_cocycle_is_refused(self, cfg):
        cover = inconsistent_cover()
        with pytest.raises(CoverStructureError):
            glue_general(cover, trivialized_data(cover, ConstantFunction(1.0)), cfg)

    def test_torus_cover_is_periodic(self, cfg):
        cover = CoverFactory.torus()
        v = LeafFunctionFactory.create_leaf_function("cos:P=1")
        section = glue_general(cover, trivialized_data(cover, v), cfg, np.linspace(0.0, 0.9, 10))
        assert section.periodicity_defect <= 2.0 * cfg.epsilon
        assert section.max_mismatch <= 2.0 * cfg.epsilon
        assert section.cocycle.holonomy == {"wrap": pytest.approx(math.e)}


class TestCircleBundle:
    def test_constant_section(self, cfg):
        section = circle_bundle_solve(ConstantFunction(1.0), cfg)
        assert_allclose(section.values, 1.0, atol=1e-12)
        assert section.metadata == {"function": "const:1.0"}

    def test_cosine_section(self, cfg):
        theta = np.linspace(0.0, TWO_PI, 65)[:-1]
        section = circle_bundle_solve(LeafFunctionFactory.create_leaf_function("cos"), cfg, theta)
        assert_allclose(section.values, 0.5 * (np.cos(theta) + np.sin(theta)), atol=1e-9)
        assert section.max_mismatch <= 2.0 * cfg.epsilon
        assert section.periodicity_defect <= 2.0 * cfg.epsilon
        assert section.max_fiber_deviation <= 1e-10

    @pytest.mark.parametrize("spec", ["poly:c0=1,c1=1", "sin:P=4"])
    def test_data_must_fit_the_circle(self, spec, cfg):
        with pytest.raises(LeafFunctionTypeError):
            circle_bundle_solve(LeafFunctionFactory.create_leaf_function(spec), cfg)


class TestAnnulusBundle:
    def test_constant_on_every_leaf(self, fast_cfg):
        v = AnnulusFunction.from_spec("const:1")
        report = annulus_bundle_solve(v, [0.0, 0.5], np.linspace(-6.0, 6.0, 61), fast_cfg)
        for section in report.leaves.values():
            assert_allclose(section.values, 1.0, atol=1e-9)
        assert_allclose(report.inner_circle.values, 1.0, atol=1e-12)
        assert report.max_gap <= 1e-9
        assert report.max_mismatch <= 2.0 * fast_cfg.epsilon
        assert set(report.inner_gaps) == set(report.outer_gaps) == {0.0, 0.5}

    def test_neighbouring_leaves_stay_close(self, fast_cfg):
        v = AnnulusFunction.from_spec("annulus:c0=-1,c1=1,trig=cos")
        report = annulus_bundle_solve(v, [0.0, 1e-3], np.linspace(-6.0, 6.0, 61), fast_cfg)
        (continuity,) = report.continuity
        assert continuity.delta <= 1e-3 / math.pi + 1e-8
        assert continuity.lipschitz == pytest.approx(continuity.delta / 1e-3)

    def test_needs_a_label(self, fast_cfg):
        with pytest.raises(ConfigurationError):
            annulus_bundle_solve(AnnulusFunction.from_spec("const:1"), [], [0.0, 1.0], fast_cfg)
