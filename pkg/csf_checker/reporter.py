"""
Report generation for verification results.

JSON and Markdown reports for single curves and trajectories, the
trajectory CSV and SVG snapshots of a flow run.
"""

import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import svgwrite

from curvegeom import ClosedCurve

from .checker import ERROR, FAIL, NOT_APPLICABLE, PASS, VerificationReport
from .flow import FlowSample, FlowTrajectory

PathLike = Union[str, Path]

STATUS_ICONS = {PASS: "✓", NOT_APPLICABLE: "-", FAIL: "✗", ERROR: "⚠"}


def _format_number(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (int, np.integer)):
        return str(value)
    if isinstance(value, (float, np.floating)):
        return f"{value:.6g}"
    return str(value)


class ReportGenerator:
    """Generate reports from a verification report"""

    def __init__(self, report: VerificationReport, title: str = "Verification Report", verbose: bool = True):
        """
        Initialize the report generator

        Args:
            report: Verification report to render
            title: Markdown heading
            verbose: Print the path of every file written
        """
        self.report = report
        self.title = title
        self.verbose = verbose

    def generate_summary(self) -> Dict[str, Any]:
        """
        Count checks by status

        Returns:
            Dictionary with per-status counts and the overall result
        """
        statuses = [c.status for c in self.report.checks]
        return {
            "total_checks": len(statuses),
            "passed": statuses.count(PASS),
            "failed": statuses.count(FAIL),
            "errors": statuses.count(ERROR),
            "not_applicable": statuses.count(NOT_APPLICABLE),
            "overall_pass": self.report.overall_pass,
        }

    def save_json(self, output_path: PathLike) -> Path:
        """
        Save the report in the JSON report format

        Args:
            output_path: Path to save the JSON file
        """
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, "w", encoding="utf-8") as f:
            json.dump(self.report.to_dict(), f, indent=2, ensure_ascii=False)

        if self.verbose:
            print(f"✓ Report saved to: {output_path}")
        return output_path

    def generate_markdown(self) -> str:
        """
        Generate a human-readable markdown report

        Returns:
            Markdown-formatted report as string
        """
        summary = self.generate_summary()
        meta = self.report.curve_meta

        md = []
        md.append(f"# {self.title}\n")

        md.append("## Summary\n")
        overall = "✓ PASS" if summary["overall_pass"] else "✗ FAIL"
        md.append(f"- **Overall**: {overall}")
        md.append(f"- **Checks**: {summary['total_checks']}")
        md.append(f"- **Passed**: {summary['passed']}")
        md.append(f"- **Failed**: {summary['failed']}")
        md.append(f"- **Errors**: {summary['errors']}")
        md.append(f"- **Not Applicable**: {summary['not_applicable']}\n")

        md.append("## Curve\n")
        for key, value in meta.items():
            md.append(f"- **{key}**: {_format_number(value)}")
        md.append("")

        md.append("## Checks\n")
        md.append("| Check | Status | Margin | Tolerance |")
        md.append("|-------|--------|--------|-----------|")
        for check in self.report.checks:
            icon = STATUS_ICONS[check.status]
            md.append(
                f"| {check.name} | {icon} {check.status} | "
                f"{_format_number(check.margin)} | {_format_number(check.tolerance)} |"
            )
        md.append("")

        details = [c for c in self.report.checks if c.details]
        if details:
            md.append("## Details\n")
            for check in details:
                md.append(f"#### {STATUS_ICONS[check.status]} {check.name}\n")
                md.append(f"{check.details}\n")

        return "\n".join(md)

    def save_markdown(self, output_path: PathLike) -> Path:
        """
        Save the markdown report to a file

        Args:
            output_path: Path to save the markdown file
        """
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, "w", encoding="utf-8") as f:
            f.write(self.generate_markdown())

        if self.verbose:
            print(f"✓ Markdown report saved to: {output_path}")
        return output_path


def save_trajectory_csv(trajectory: FlowTrajectory, output_path: PathLike, verbose: bool = True) -> Path:
    """
    Write one row per sample: t, area, length, k_max, K_max, isoper_ratio, convex

    Args:
        trajectory: Flow trajectory
        output_path: CSV path
        verbose: Print the path written
    """
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(FlowSample.CSV_COLUMNS))
        writer.writeheader()
        for sample in trajectory.samples:
            writer.writerow(sample.to_row())

    if verbose:
        print(f"✓ Trajectory ({len(trajectory.samples)} samples) saved to: {output_path}")
    return output_path


def fitted_viewbox(curve: ClosedCurve, pad_fraction: float = 0.05) -> Tuple[float, float, float, float]:
    """SVG viewBox around a curve's bounding box (y axis flipped)"""
    lo, hi = curve.bounding_box
    pad = pad_fraction * float(np.max(hi - lo))
    return (
        float(lo[0] - pad),
        float(-hi[1] - pad),
        float(hi[0] - lo[0] + 2 * pad),
        float(hi[1] - lo[1] + 2 * pad),
    )


def save_curve_svg(
    curve: ClosedCurve,
    output_path: PathLike,
    viewbox: Optional[Tuple[float, float, float, float]] = None,
    label: Optional[str] = None,
) -> Path:
    """
    Draw a curve outline as an SVG polygon

    Args:
        curve: Curve to draw
        output_path: SVG path
        viewbox: Fixed viewBox (default: fitted to this curve)
        label: Optional caption in the top-left corner
    """
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    viewbox = viewbox or fitted_viewbox(curve)
    stroke = viewbox[2] / 400.0

    height = 400 * viewbox[3] / viewbox[2]
    dwg = svgwrite.Drawing(
        str(output_path), profile="tiny", size=("400px", f"{height:.0f}px"), debug=False
    )
    dwg.attribs["viewBox"] = " ".join(f"{v:.6g}" for v in viewbox)
    dwg.add(
        dwg.polygon(
            points=[(float(x), float(-y)) for x, y in curve.points],
            stroke="#111",
            fill="none",
            stroke_width=stroke,
        )
    )
    if label:
        dwg.add(
            dwg.text(
                label,
                insert=(viewbox[0] + 4 * stroke, viewbox[1] + 16 * stroke),
                font_size=12 * stroke,
                fill="#555",
            )
        )
    dwg.save()
    return output_path


def save_svg_snapshots(trajectory: FlowTrajectory, output_dir: PathLike, verbose: bool = True) -> List[Path]:
    """
    One SVG per stored snapshot, all sharing the initial curve's viewport

    Returns:
        Paths written, in time order
    """
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    if not trajectory.snapshots:
        return []

    viewbox = fitted_viewbox(trajectory.snapshots[0][1])
    paths = []
    for i, (t, curve) in enumerate(trajectory.snapshots):
        paths.append(
            save_curve_svg(curve, output_dir / f"snapshot_{i:04d}.svg", viewbox, label=f"t = {t:.4f}")
        )

    if verbose:
        print(f"✓ {len(paths)} SVG snapshot(s) saved to: {output_dir}")
    return paths
