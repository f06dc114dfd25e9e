"""Tests for reports, manifests and batch verification"""

import json
import xml.etree.ElementTree as ET

import pytest

from conftest import figure_eight, regular_polygon
from csf_checker.batch import WORKERS_ENV, CorpusVerifier, default_workers
from csf_checker.checker import CurveChecker
from csf_checker.corpus import corpus_sweep, sweep_specs
from csf_checker.flow import FlowConfig, run
from csf_checker.manifest import RunManifest, sha256_file
from csf_checker.reporter import fitted_viewbox, save_curve_svg, save_trajectory_csv


class TestWorkers:
    def test_env_override(self, monkeypatch):
        monkeypatch.setenv(WORKERS_ENV, "3")
        assert default_workers() == 3

    @pytest.mark.parametrize("value", ["zero", "0", "-2"])
    def test_env_rejects_bad_values(self, monkeypatch, value):
        monkeypatch.setenv(WORKERS_ENV, value)
        with pytest.raises(ValueError):
            default_workers()

    def test_defaults_to_cpu_count(self, monkeypatch):
        monkeypatch.delenv(WORKERS_ENV, raising=False)
        assert default_workers() >= 1


class TestCorpusVerifier:
    def test_results_in_index_order(self, tmp_path):
        specs = sweep_specs(4, 21, n_points=256)
        curves = corpus_sweep(4, 21, n_points=256)
        verifier = CorpusVerifier(workers=3, verbose=False)
        results = verifier.verify(curves, specs)

        assert [r["index"] for r in results] == [0, 1, 2, 3]
        assert [r["seed"] for r in results] == [21, 22, 23, 24]
        summary = verifier.summary()
        assert summary["curves"] == 4
        assert summary["min_margin"] > 0
        assert verifier.summary_line().endswith(f"violations: {summary['violations']}")

        json_path, md_path = verifier.generate_collective_report(tmp_path)
        data = json.loads(json_path.read_text())
        assert data["summary"]["curves"] == 4
        assert "# Corpus Verification Report" in md_path.read_text()

    def test_violation_is_counted(self):
        verifier = CorpusVerifier(workers=1, verbose=False)
        verifier.verify([regular_polygon(256), figure_eight()])
        summary = verifier.summary()
        assert summary["violations"] == 1
        assert summary["violating_indices"] == [1]
        assert summary["min_margin_index"] == 0

    def test_flow_trajectories_are_verified(self):
        verifier = CorpusVerifier(
            checker=CurveChecker(n_points=128),
            flow_config=FlowConfig(n_points=128, stop_area_fraction=0.5, normalize=True),
            workers=1,
            verbose=False,
        )
        result = verifier.verify([regular_polygon(128)])[0]
        assert result["trajectory_pass"] is True
        assert result["overall_pass"] is True


class TestRunManifest:
    def test_missing_outputs_mark_partial(self, tmp_path):
        written = tmp_path / "a.txt"
        written.write_text("a")
        manifest = RunManifest("gen", {"seed": 1}, "1.0.0")
        manifest.add_output(written)
        manifest.add_output(tmp_path / "never.txt")
        manifest.finish(0)
        path = manifest.save(tmp_path / "m.json", verbose=False)

        data = json.loads(path.read_text())
        assert data["outputs"] == [str(written)]
        assert data["partial"] is True
        assert data["duration_s"] >= 0

    def test_input_hash(self, tmp_path):
        path = tmp_path / "in.json"
        path.write_text("{}")
        manifest = RunManifest("verify", {}, "1.0.0")
        manifest.add_input(path)
        assert manifest.inputs[str(path)] == sha256_file(path)
        assert len(sha256_file(path)) == 64


class TestSvg:
    def test_viewbox_contains_curve(self):
        x, y, w, h = fitted_viewbox(regular_polygon(64, radius=2.0))
        assert x < -2.0 and y < -2.0
        assert x + w > 2.0 and y + h > 2.0

    def test_curve_svg_is_valid_xml(self, tmp_path):
        path = save_curve_svg(regular_polygon(64), tmp_path / "c.svg", label="t = 0")
        root = ET.parse(path).getroot()
        assert root.tag.endswith("svg")
        polygons = [el for el in root.iter() if el.tag.endswith("polygon")]
        assert len(polygons) == 1


def test_trajectory_csv_has_one_row_per_sample(tmp_path):
    trajectory = run(regular_polygon(64), FlowConfig(n_points=64, stop_area_fraction=0.8, pde_residuals=False))
    path = save_trajectory_csv(trajectory, tmp_path / "t.csv", verbose=False)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,area,length,k_max,K_max,isoper_ratio,convex"
    assert len(lines) == len(trajectory.samples) + 1
