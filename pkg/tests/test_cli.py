import json

import pytest

from cli.cli import DEFAULTS, HANDLERS, _preprocess, run
from cli.csv_output import read_csv
from cli.scenario import REPORT_NAME, GridSpec
from core.exceptions import ConfigurationError


def _report(directory) -> dict:
    return json.loads((directory / REPORT_NAME).read_text(encoding="utf-8"))


class TestArguments:
    def test_negative_values_are_joined(self):
        argv = ["solve-spiral", "--grid", "-3:3:61", "--s", "-0.5", "--v", "const:1"]
        assert _preprocess(argv) == ["solve-spiral", "--grid=-3:3:61", "--s=-0.5", "--v", "const:1"]

    def test_every_subcommand_has_a_handler(self):
        assert set(DEFAULTS) == set(HANDLERS)

    @pytest.mark.parametrize("text", ["1:2", "a:b:3", "2:1:10", "0:1:2"])
    def test_bad_grids(self, text):
        with pytest.raises((ConfigurationError, ValueError)):
            GridSpec.parse(text)

    def test_unknown_subcommand(self, tmp_path):
        assert run(["solve-moon", "--output", str(tmp_path)]) == 2

    def test_missing_subcommand(self):
        assert run([]) == 2


class TestRun:
    def test_solve_line_passes(self, tmp_path):
        assert run(["solve-line", "--v", "sin", "--grid", "-1:1:101", "--output", str(tmp_path)]) == 0
        columns, table = read_csv(tmp_path / "profile.csv")
        assert columns == ["t", "u"]
        assert table.shape == (101, 2)
        report = _report(tmp_path)
        assert report["passed"]
        assert report["scenario"]["subcommand"] == "solve-line"
        assert report["scenario"]["grid"] == {"minimum": -1.0, "maximum": 1.0, "count": 101}
        assert report["files"] == [str(tmp_path / "profile.csv")]

    def test_failed_tolerance_exits_one(self, tmp_path):
        argv = ["solve-line", "--v", "sin", "--grid", "-1:1:101", "--tol-residual", "1e-30", "--output", str(tmp_path)]
        assert run(argv) == 1
        report = _report(tmp_path)
        assert not report["passed"]
        assert [m["name"] for m in report["metrics"] if not m["passed"]] == ["residual_sup"]

    def test_bad_function_spec_exits_one(self, tmp_path):
        assert run(["solve-line", "--v", "tan:k=1", "--output", str(tmp_path)]) == 1
        assert not (tmp_path / REPORT_NAME).exists()

    def test_invalid_operator_setting_exits_one(self, tmp_path):
        assert run(["solve-line", "--epsilon", "-1", "--output", str(tmp_path)]) == 1

    def test_singular_line(self, tmp_path):
        assert run(["singular-line", "--output", str(tmp_path)]) == 0
        columns, table = read_csv(tmp_path / "solution.csv")
        assert columns == ["x", "u"]
        assert abs(table[:, 1]).max() <= 3.0 + 1e-6

    def test_bundle_glue_on_circle(self, tmp_path):
        assert run(["bundle-glue", "--cover", "circle", "--output", str(tmp_path)]) == 0
        names = {m["name"] for m in _report(tmp_path)["metrics"]}
        assert {"cocycle_deviation", "max_mismatch", "periodicity_defect", "holonomy[R]"} <= names

    def test_bundle_glue_rejects_incompatible_data(self, tmp_path):
        assert run(["bundle-glue", "--cover", "torus", "--v", "cos", "--output", str(tmp_path)]) == 1

    def test_solve_flow(self, tmp_path):
        argv = ["solve-flow", "--v", "sin:axis=0,k=3", "--point", "0.3,-0.2;1,1", "--time-step", "0.01", "--output", str(tmp_path)]
        assert run(argv) == 0
        columns, table = read_csv(tmp_path / "field.csv")
        assert columns == ["x0", "x1", "U"]
        assert table.shape == (2, 3)

    def test_solve_flow_uses_residual_tolerance(self, tmp_path):
        argv = [
            "solve-flow", "--v", "sin:axis=0,k=3", "--point", "0.3,-0.2", "--time-step", "0.01",
            "--tol-residual", "1e-30", "--tol-derivative", "1.0", "--output", str(tmp_path),
        ]
        assert run(argv) == 1
        metric = next(m for m in _report(tmp_path)["metrics"] if m["name"] == "field_residual")
        assert metric["tolerance"] == 1e-30
        assert not metric["passed"]

    def test_verify_bundle_suite(self, tmp_path):
        assert run(["verify", "--suite", "bundle", "--output", str(tmp_path)]) == 0
        names = [m["name"] for m in _report(tmp_path)["metrics"]]
        assert "bundle.inconsistent_fixture_flagged" in names
        assert all(name.startswith("bundle.") for name in names)

    def test_output_directory_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setattr("cli.cli.settings.output_dir", str(tmp_path / "env"))
        assert run(["solve-line", "--grid", "0:1:11"]) == 0
        assert (tmp_path / "env" / "profile.csv").is_file()
