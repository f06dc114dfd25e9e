"""
Batch verification of generated corpora.

Curves are verified in a thread pool, one task per curve; results are
merged in curve-index order so reports do not depend on scheduling.
A collective JSON and Markdown report summarises the run.
"""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from curvegeom import ClosedCurve
from curvegeom.exceptions import CurveError

from .checker import CurveChecker, VerificationReport
from .corpus import CurveSpec
from .flow import FlowConfig, run

WORKERS_ENV = "CSF_CHECKER_WORKERS"


def default_workers() -> int:
    """Worker count from CSF_CHECKER_WORKERS, else the CPU count"""
    value = os.getenv(WORKERS_ENV)
    if value:
        try:
            workers = int(value)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be an integer, got '{value}'")
        if workers < 1:
            raise ValueError(f"{WORKERS_ENV} must be >= 1, got {workers}")
        return workers
    return os.cpu_count() or 1


class CorpusVerifier:
    """Verify a list of curves and generate collective reports"""

    def __init__(
        self,
        checker: Optional[CurveChecker] = None,
        flow_config: Optional[FlowConfig] = None,
        workers: Optional[int] = None,
        verbose: bool = True,
    ):
        """
        Initialize the corpus verifier

        Args:
            checker: Checker used for every curve
            flow_config: When given, every curve is also flowed (area-pi
                         normalised) and its trajectory verified
            workers: Thread count (default: CSF_CHECKER_WORKERS or CPU count)
            verbose: Print banners and show a progress bar
        """
        self.checker = checker or CurveChecker()
        self.flow_config = flow_config
        self.workers = workers or default_workers()
        self.verbose = verbose
        self.results: List[Dict[str, Any]] = []

    def verify_one(
        self, index: int, curve: ClosedCurve, spec: Optional[CurveSpec] = None
    ) -> Dict[str, Any]:
        """
        Verify a single curve (and its flow trajectory when configured)

        Args:
            index: Curve index in the corpus
            curve: Curve to verify
            spec: Spec the curve was generated from

        Returns:
            Dictionary with the curve's status, main margin and reports
        """
        result: Dict[str, Any] = {
            "index": index,
            "kind": spec.kind.value if spec else None,
            "seed": spec.seed if spec else None,
            "status": "success",
        }

        report = self.checker.verify_curve(curve, meta={"index": index})
        result["report"] = report.to_dict()
        result["overall_pass"] = report.overall_pass
        result["main_margin"] = _margin(report, "main_inequality")

        if self.flow_config is not None:
            try:
                trajectory = run(curve, self.flow_config)
                traj_report = self.checker.verify_trajectory(trajectory, meta={"index": index})
                result["trajectory_report"] = traj_report.to_dict()
                result["trajectory_pass"] = traj_report.overall_pass
                result["overall_pass"] = result["overall_pass"] and traj_report.overall_pass
            except CurveError as e:
                result["status"] = "error"
                result["error"] = f"{type(e).__name__}: {e}"
                result["trajectory_pass"] = False
                result["overall_pass"] = False

        return result

    def verify(
        self, curves: List[ClosedCurve], specs: Optional[List[CurveSpec]] = None
    ) -> List[Dict[str, Any]]:
        """
        Verify every curve, merging results in index order

        Args:
            curves: Curves to verify
            specs: Matching generator specs (optional)

        Returns:
            List of per-curve results
        """
        specs = specs or [None] * len(curves)

        if self.verbose:
            print(f"\n{'='*70}")
            print("CORPUS VERIFICATION")
            print(f"{'='*70}")
            print(f"Curves: {len(curves)}")
            print(f"Workers: {self.workers}")
            print(f"Flow trajectories: {'yes' if self.flow_config else 'no'}")
            print(f"{'='*70}")

        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            futures = [
                pool.submit(self.verify_one, i, curve, spec)
                for i, (curve, spec) in enumerate(zip(curves, specs))
            ]
            results = []
            for future in tqdm(
                futures,
                desc="Verifying curves",
                unit="curve",
                ncols=100,
                disable=not self.verbose,
            ):
                results.append(future.result())

        self.results = sorted(results, key=lambda r: r["index"])
        return self.results

    def summary(self) -> Dict[str, Any]:
        """Corpus-level statistics"""
        margins = [r["main_margin"] for r in self.results if r["main_margin"] is not None]
        violations = [r["index"] for r in self.results if not r["overall_pass"]]
        min_index = None
        if margins:
            min_index = min(
                (r for r in self.results if r["main_margin"] is not None),
                key=lambda r: r["main_margin"],
            )["index"]
        return {
            "curves": len(self.results),
            "passed": len(self.results) - len(violations),
            "violations": len(violations),
            "violating_indices": violations,
            "errors": sum(1 for r in self.results if r["status"] == "error"),
            "min_margin": float(np.min(margins)) if margins else None,
            "min_margin_index": min_index,
            "flow": self.flow_config is not None,
        }

    def summary_line(self) -> str:
        summary = self.summary()
        margin = summary["min_margin"]
        margin_text = "n/a" if margin is None else f"{margin:.6e}"
        return f"min_margin={margin_text}, violations: {summary['violations']}"

    def generate_collective_report(self, output_dir: Path, stem: str = "corpus_report") -> Tuple[Path, Path]:
        """
        Write the collective JSON and Markdown reports

        Args:
            output_dir: Directory for output files
            stem: File name stem

        Returns:
            (json_path, markdown_path)
        """
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        summary = self.summary()

        md_lines = [
            "# Corpus Verification Report",
            "",
            "## Overall Summary",
            "",
            f"- **Curves Verified:** {summary['curves']}",
            f"- **Passed:** {summary['passed']}",
            f"- **Violations:** {summary['violations']}",
            f"- **Errors:** {summary['errors']}",
            f"- **Minimum Main-Inequality Margin:** {_fmt(summary['min_margin'])} "
            f"(curve {summary['min_margin_index']})",
            f"- **Flow Trajectories:** {'yes' if summary['flow'] else 'no'}",
            "",
            "## Individual Curve Results",
            "",
            "| Curve | Kind | Seed | Status | Main Margin | Failed Checks |",
            "|-------|------|------|--------|-------------|---------------|",
        ]

        for result in self.results:
            icon = "✓" if result["overall_pass"] else "✗"
            failed = _failed_checks(result)
            md_lines.append(
                f"| {result['index']} | {result['kind'] or '-'} | {_fmt(result['seed'])} | {icon} | "
                f"{_fmt(result['main_margin'])} | {', '.join(failed) or '-'} |"
            )

        problems = [r for r in self.results if not r["overall_pass"]]
        if problems:
            md_lines.extend(["", "## Violations", ""])
            for result in problems:
                md_lines.append(f"### Curve {result['index']}")
                md_lines.append("")
                if result.get("error"):
                    md_lines.append(f"- **Error:** {result['error']}")
                for key in ("report", "trajectory_report"):
                    for check in result.get(key, {}).get("checks", []):
                        if not check["pass"]:
                            md_lines.append(f"- **{check['name']}** ({check['status']}): {check['details']}")
                md_lines.append("")

        collective_md = output_dir / f"{stem}.md"
        with open(collective_md, "w", encoding="utf-8") as f:
            f.write("\n".join(md_lines) + "\n")

        collective_json = output_dir / f"{stem}.json"
        with open(collective_json, "w", encoding="utf-8") as f:
            json.dump(
                {"summary": summary, "results": self.results},
                f,
                indent=2,
                ensure_ascii=False,
            )

        if self.verbose:
            print(f"\n{'='*70}")
            print("COLLECTIVE REPORT GENERATED")
            print(f"{'='*70}")
            print(f"✓ Markdown report: {collective_md}")
            print(f"✓ JSON report: {collective_json}")

        return collective_json, collective_md

    def print_summary(self) -> None:
        """Print a summary of the verification run"""
        if not self.results:
            print("No results to summarize")
            return

        summary = self.summary()
        print(f"\n{'='*70}")
        print("CORPUS VERIFICATION COMPLETE")
        print(f"{'='*70}")
        print(f"Curves: {summary['curves']}")
        print(f"Passed: {summary['passed']}")
        print(f"Violations: {summary['violations']}")
        print(f"Errors: {summary['errors']}")
        print(f"{'='*70}\n")


def _margin(report: VerificationReport, name: str) -> Optional[float]:
    check = report.get(name)
    return None if check is None else check.margin


def _failed_checks(result: Dict[str, Any]) -> List[str]:
    names = []
    for key in ("report", "trajectory_report"):
        for check in result.get(key, {}).get("checks", []):
            if not check["pass"]:
                names.append(check["name"] if key == "report" else f"flow:{check['name']}")
    return names


def _fmt(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)
