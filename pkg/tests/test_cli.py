"""End-to-end tests of the csf-checker command line"""

import csv
import json
import math

import pytest

from conftest import figure_eight
from curvegeom import load_curve, save_curve
from csf_checker.__main__ import main


def read_json(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


class TestGen:
    def test_circle(self, tmp_path):
        out = tmp_path / "c.json"
        code = main(["gen", "--kind", "circle", "--r", "1", "--n", "512", "--out", str(out), "-q"])
        assert code == 0
        assert len(read_json(out)["points"]) == 512

        manifest = read_json(tmp_path / "c.manifest.json")
        assert manifest["command"] == "gen"
        assert manifest["outputs"] == [str(out)]
        assert manifest["exit_code"] == 0
        assert manifest["partial"] is False
        assert manifest["config"]["resolved_spec"]["kind"] == "circle"

    def test_planar_fourier_is_reproducible(self, tmp_path):
        args = ["gen", "--kind", "planar-fourier", "--seed", "42", "--modes", "5", "-q"]
        assert main([*args, "--out", str(tmp_path / "a.json")]) == 0
        assert main([*args, "--out", str(tmp_path / "b.json")]) == 0
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_spec_file(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"kind": "ellipse", "params": {"a": 3, "b": 1}, "n_points": 128}))
        out = tmp_path / "e.json"
        assert main(["gen", "--spec", str(spec), "--out", str(out), "-q"]) == 0
        assert len(read_json(out)["points"]) == 128
        assert str(spec) in read_json(tmp_path / "e.manifest.json")["inputs"]

    def test_invalid_radial_spec(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        code = main(
            [
                "gen",
                "--kind",
                "radial-fourier",
                "--r0",
                "1",
                "--coeff-a",
                "0.6",
                "--coeff-b",
                "0.5",
                "--out",
                str(out),
                "-q",
            ]
        )
        assert code == 2
        assert "sum of |coefficients| < r0" in capsys.readouterr().err
        assert not out.exists()


class TestVerify:
    def test_circle_file(self, tmp_path, capsys):
        curve_path = tmp_path / "c.json"
        main(["gen", "--kind", "circle", "--r", "1", "--out", str(curve_path), "-q"])
        report_path = tmp_path / "report.json"

        code = main(["verify", "--input", str(curve_path), "--out", str(report_path), "-q"])
        assert code == 0
        assert "violations: 0" in capsys.readouterr().out

        report = read_json(report_path)
        assert report["overall_pass"] is True
        main_check = next(c for c in report["checks"] if c["name"] == "main_inequality")
        assert abs(main_check["margin"]) <= 1e-4
        assert (tmp_path / "report.md").exists()
        assert read_json(tmp_path / "report.manifest.json")["exit_code"] == 0

    def test_figure_eight_fails(self, tmp_path, capsys):
        curve_path = save_curve(figure_eight(), tmp_path / "eight.json")
        report_path = tmp_path / "eight_report.json"

        code = main(["verify", "--input", str(curve_path), "--out", str(report_path), "-q"])
        assert code == 1
        assert "violations: 1" in capsys.readouterr().out
        report = read_json(report_path)
        assert report["checks"][0]["name"] == "hypotheses"
        assert report["checks"][0]["pass"] is False

    def test_clockwise_input_is_flagged(self, tmp_path):
        curve_path = tmp_path / "c.json"
        main(["gen", "--kind", "circle", "--out", str(curve_path), "-q"])
        curve, _ = load_curve(curve_path, verbose=False)
        save_curve(curve.reversed(), curve_path)

        report_path = tmp_path / "report.json"
        assert main(["verify", "--input", str(curve_path), "--out", str(report_path), "-q"]) == 0
        assert read_json(report_path)["curve_meta"]["reversed"] is True

    def test_small_corpus(self, tmp_path, capsys):
        out = tmp_path / "corpus_report.json"
        code = main(["verify", "--corpus", "5", "--seed", "7", "--out", str(out), "-q"])
        assert code == 0
        assert "violations: 0" in capsys.readouterr().out

        data = read_json(out)
        assert data["summary"]["curves"] == 5
        assert [r["index"] for r in data["results"]] == list(range(5))
        assert (tmp_path / "corpus_report.md").exists()

    def test_missing_input(self, tmp_path):
        code = main(["verify", "--input", str(tmp_path / "nope.json"), "--out", str(tmp_path / "r.json")])
        assert code == 2

    def test_bad_mix(self, tmp_path):
        code = main(
            ["verify", "--corpus", "3", "--mix", "spiral=1", "--out", str(tmp_path / "r.json"), "-q"]
        )
        assert code == 2


class TestFlow:
    @pytest.mark.parametrize("svg_every", [0.07, 0.06])
    def test_circle_flow_outputs(self, tmp_path, svg_every):
        curve_path = tmp_path / "c.json"
        main(["gen", "--kind", "circle", "--n", "128", "--out", str(curve_path), "-q"])
        out = tmp_path / "traj.csv"
        svg_dir = tmp_path / "frames"

        code = main(
            [
                "flow",
                "--input",
                str(curve_path),
                "--n",
                "128",
                "--stop-area-frac",
                "0.5",
                "--svg-dir",
                str(svg_dir),
                "--svg-every",
                str(svg_every),
                "--out",
                str(out),
                "-q",
            ]
        )
        assert code == 0

        with open(out, newline="", encoding="utf-8") as f:
            rows = list(csv.DictReader(f))
        assert list(rows[0]) == ["t", "area", "length", "k_max", "K_max", "isoper_ratio", "convex"]
        assert float(rows[0]["t"]) == 0.0
        final_t = float(rows[-1]["t"])
        assert final_t == pytest.approx(0.25, rel=1e-2)

        svgs = sorted(svg_dir.glob("snapshot_*.svg"))
        assert len(svgs) == math.ceil(final_t / svg_every)

        report = read_json(tmp_path / "traj.report.json")
        assert report["overall_pass"] is True
        manifest = read_json(tmp_path / "traj.manifest.json")
        assert manifest["partial"] is False
        assert str(out) in manifest["outputs"]
        assert manifest["config"]["flow_config"]["n_points"] == 128

    def test_flow_rejects_bad_safety(self, tmp_path):
        curve_path = tmp_path / "c.json"
        main(["gen", "--kind", "circle", "--n", "64", "--out", str(curve_path), "-q"])
        code = main(
            ["flow", "--input", str(curve_path), "--dt-safety", "2", "--out", str(tmp_path / "t.csv"), "-q"]
        )
        assert code == 2

    def test_step_limit_writes_partial_outputs(self, tmp_path, capsys):
        curve_path = tmp_path / "c.json"
        main(["gen", "--kind", "circle", "--n", "64", "--out", str(curve_path), "-q"])
        out = tmp_path / "traj.csv"
        code = main(
            [
                "flow",
                "--input",
                str(curve_path),
                "--n",
                "64",
                "--max-steps",
                "2",
                "--no-pde-residuals",
                "--out",
                str(out),
                "-q",
            ]
        )
        assert code == 1
        assert "Step limit 2" in capsys.readouterr().err

        with open(out, newline="", encoding="utf-8") as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 1

        report = read_json(tmp_path / "traj.report.json")
        hypotheses = next(c for c in report["checks"] if c["name"] == "hypotheses")
        assert hypotheses["status"] == "fail"

        manifest = read_json(tmp_path / "traj.manifest.json")
        assert manifest["partial"] is True
        assert manifest["exit_code"] == 1
        assert str(out) in manifest["outputs"]
        assert manifest["config"]["flow_config"]["max_steps"] == 2
