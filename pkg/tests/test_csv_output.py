import numpy as np
import pytest

from bundle.gluing import annulus_bundle_solve
from cli.csv_output import emit_annulus, emit_csv, emit_profile, read_csv
from core.exceptions import OutputError
from geometry.annulus_function import AnnulusFunction
from solver.leaf_function import ConstantFunction
from solver.line_operator import solve_on_line


class TestEmitCsv:
    def test_header_and_rows(self, tmp_path, cfg):
        profile = solve_on_line(ConstantFunction(1.0), [0.0, 0.5, 1.0], cfg)
        path = emit_profile(profile, tmp_path / "profile.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 4
        assert lines[0] == "# columns: t,u"
        assert lines[1].startswith("0,")

    def test_values_read_back_exactly(self, tmp_path):
        rng = np.random.default_rng(7)
        x, y = rng.normal(size=50), rng.uniform(-1e-300, 1e300, size=50)
        columns, table = read_csv(emit_csv(("x", "y"), (x, y), tmp_path / "data.csv"))
        assert columns == ["x", "y"]
        assert np.array_equal(table[:, 0], x)
        assert np.array_equal(table[:, 1], y)

    def test_repeated_writes_are_identical(self, tmp_path):
        data = (np.linspace(0.0, 1.0, 11), np.sin(np.linspace(0.0, 1.0, 11)))
        first = emit_csv(("t", "u"), data, tmp_path / "a.csv").read_bytes()
        second = emit_csv(("t", "u"), data, tmp_path / "b.csv").read_bytes()
        assert first == second
        assert b"\r" not in first

    def test_creates_parent_directories(self, tmp_path):
        path = emit_csv(("t",), ([1.0],), tmp_path / "nested" / "deeper" / "one.csv")
        assert path.is_file()

    def test_column_count_must_match(self, tmp_path):
        with pytest.raises(OutputError):
            emit_csv(("t", "u"), ([1.0],), tmp_path / "bad.csv")

    def test_directory_target(self, tmp_path):
        with pytest.raises(OutputError) as excinfo:
            emit_csv(("t",), ([1.0],), tmp_path)
        assert excinfo.value.path == str(tmp_path)

    def test_missing_header(self, tmp_path):
        path = tmp_path / "plain.csv"
        path.write_text("1,2\n3,4\n", encoding="utf-8")
        with pytest.raises(OutputError):
            read_csv(path)


class TestEmitAnnulus:
    def test_one_file_per_leaf_and_circle(self, tmp_path, fast_cfg):
        report = annulus_bundle_solve(AnnulusFunction.from_spec("const:1"), [0.0, 1.0], np.linspace(-3.0, 3.0, 13), fast_cfg)
        written = emit_annulus(report, tmp_path)
        assert sorted(p.name for p in written) == [
            "index.csv",
            "inner_circle.csv",
            "outer_circle.csv",
            "spiral_0.csv",
            "spiral_1.csv",
        ]
        columns, table = read_csv(tmp_path / "index.csv")
        assert columns == ["leaf", "s", "inner_gap", "outer_gap"]
        assert np.array_equal(table[:, 1], [0.0, 1.0])
