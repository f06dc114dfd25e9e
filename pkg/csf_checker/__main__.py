#!/usr/bin/env python3
"""
Command-line interface for the curve shortening flow checker.

Subcommands:
    gen     generate a curve file from a spec file or inline flags
    flow    integrate the flow from a curve file, export CSV / SVG / report
    verify  verify a curve file or a generated corpus

Exit codes: 0 all checks pass, 1 check failure or error, 2 invalid input.
"""

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from curvegeom import load_curve, save_curve
from curvegeom.exceptions import (
    CurveError,
    FlowError,
    GenerationError,
)

from . import __version__
from .batch import CorpusVerifier, default_workers
from .checker import CurveChecker
from .corpus import DEFAULT_MIX, CurveSpec, generate, sweep_specs
from .flow import FlowConfig, FlowTrajectory, run
from .manifest import RunManifest
from .reporter import ReportGenerator, save_svg_snapshots, save_trajectory_csv

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INVALID = 2


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def _point(text: str) -> List[float]:
    values = _float_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y, got '{text}'")
    return values


def _mix(text: str) -> Dict[str, float]:
    mix = {}
    for part in text.split(","):
        if not part.strip():
            continue
        try:
            key, value = part.split("=")
            mix[key.strip()] = float(value)
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"expected category=weight pairs (e.g. convex=0.2,star=0.4), got '{part}'"
            )
    return mix


def _config_echo(args: argparse.Namespace) -> Dict[str, Any]:
    echo = {}
    for key, value in vars(args).items():
        if key == "handler":
            continue
        echo[key] = str(value) if isinstance(value, Path) else value
    return echo


def _manifest_path(out: Path) -> Path:
    return out.with_name(f"{out.stem}.manifest.json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csf-checker",
        description="Simulate the curve shortening flow and verify k_max >= sqrt(pi / A) on discrete curves",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Generate curves
  %(prog)s gen --kind circle --r 1 --n 512 --out c.json
  %(prog)s gen --kind planar-fourier --seed 42 --modes 5 --out f.json
  %(prog)s gen --kind preset --preset bean --out bean.json

  # Flow a curve to 10%% of its area
  %(prog)s flow --input c.json --stop-area-frac 0.1 --out traj.csv
  %(prog)s flow --input bean.json --out bean.csv --svg-dir frames/ --svg-every 0.05

  # Verify
  %(prog)s verify --input c.json
  %(prog)s verify --corpus 100 --seed 7
  %(prog)s verify --corpus 20 --seed 7 --flow

Environment:
  CSF_CHECKER_WORKERS   worker threads for corpus verification (default: CPU count)
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    # gen
    gen = sub.add_parser("gen", help="Generate a curve file")
    gen.add_argument("--spec", type=Path, help="Curve spec JSON file (overrides inline flags)")
    gen.add_argument(
        "--kind",
        default="circle",
        help="circle, ellipse, radial-fourier, planar-fourier or preset (default: circle)",
    )
    gen.add_argument("--r", "--radius", dest="radius", type=float, help="Circle radius")
    gen.add_argument("--a", type=float, help="Ellipse semi-axis along x")
    gen.add_argument("--b", type=float, help="Ellipse semi-axis along y")
    gen.add_argument("--rotation", type=float, help="Ellipse rotation in radians")
    gen.add_argument("--center", type=_point, help="Center as x,y")
    gen.add_argument("--r0", type=float, help="Radial base radius")
    gen.add_argument("--coeff-a", type=_float_list, help="Radial cosine coefficients, mode 1 first")
    gen.add_argument("--coeff-b", type=_float_list, help="Radial sine coefficients, mode 1 first")
    gen.add_argument("--modes", type=int, help="Number of Fourier modes")
    gen.add_argument("--amplitude", type=float, help="Random radial amplitude as a fraction of r0")
    gen.add_argument("--preset", help="Preset name (bean or kidney)")
    gen.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    gen.add_argument("--n", type=int, default=512, help="Number of points (default: 512)")
    gen.add_argument("--out", type=Path, required=True, help="Output curve JSON file")
    gen.add_argument("-q", "--quiet", action="store_true", help="Quiet mode - minimal output")
    gen.set_defaults(handler=cmd_gen)

    # flow
    flow = sub.add_parser("flow", help="Integrate the curve shortening flow")
    flow.add_argument("--input", type=Path, required=True, help="Input curve JSON file")
    flow.add_argument("--out", type=Path, required=True, help="Trajectory CSV file")
    flow.add_argument("--report", type=Path, help="Report JSON (default: <out>.report.json)")
    flow.add_argument("--n", type=int, default=512, help="Points maintained by resampling (default: 512)")
    flow.add_argument("--dt-safety", type=float, default=0.25, help="Time-step safety factor (default: 0.25)")
    flow.add_argument(
        "--stop-area-frac", type=float, default=0.1, help="Stop at this fraction of the initial area (default: 0.1)"
    )
    flow.add_argument("--resample-every", type=int, default=10, help="Steps between resampling (default: 10)")
    flow.add_argument(
        "--sample-interval", type=float, default=None, help="Flow time between samples (default: T/100)"
    )
    flow.add_argument("--normalize", action="store_true", help="Scale the input to area pi first")
    flow.add_argument("--svg-dir", type=Path, help="Directory for SVG snapshots")
    flow.add_argument("--svg-every", type=float, help="Flow time between SVG snapshots (default: T/20)")
    flow.add_argument("--no-pde-residuals", action="store_true", help="Skip the per-sample PDE residual")
    flow.add_argument(
        "--max-steps", type=int, default=5_000_000, help="Abort after this many Euler steps (default: 5000000)"
    )
    flow.add_argument("-q", "--quiet", action="store_true", help="Quiet mode - minimal output")
    flow.set_defaults(handler=cmd_flow)

    # verify
    verify = sub.add_parser("verify", help="Verify a curve file or a generated corpus")
    source = verify.add_mutually_exclusive_group(required=True)
    source.add_argument("--input", type=Path, help="Curve JSON file")
    source.add_argument("--corpus", type=int, help="Generate and verify a corpus of this many curves")
    verify.add_argument("--seed", type=int, default=0, help="Corpus seed (default: 0)")
    verify.add_argument(
        "--mix",
        type=_mix,
        default=None,
        help="Corpus weights, e.g. convex=0.2,star=0.4,general=0.4 (default)",
    )
    verify.add_argument("--flow", action="store_true", help="Also flow and verify every corpus curve")
    verify.add_argument("--n", type=int, default=512, help="Points per curve (default: 512)")
    verify.add_argument(
        "--grid-resolution", type=int, default=512, help="Inscribed-disk grid size (default: 512)"
    )
    verify.add_argument("--dt-safety", type=float, default=0.25, help="Flow time-step safety factor (default: 0.25)")
    verify.add_argument(
        "--stop-area-frac", type=float, default=0.1, help="Flow stop area fraction (default: 0.1)"
    )
    verify.add_argument("--out", type=Path, help="Report JSON (default: report.json / corpus_report.json)")
    verify.add_argument("-q", "--quiet", action="store_true", help="Quiet mode - minimal output")
    verify.set_defaults(handler=cmd_verify)

    return parser


def _spec_from_args(args: argparse.Namespace) -> CurveSpec:
    if args.spec:
        with open(args.spec, "r", encoding="utf-8") as f:
            return CurveSpec.from_dict(json.load(f))

    params: Dict[str, Any] = {}
    optional = {
        "radius": args.radius,
        "a": args.a,
        "b": args.b,
        "rotation": args.rotation,
        "center": args.center,
        "r0": args.r0,
        "modes": args.modes,
        "amplitude": args.amplitude,
        "name": args.preset,
    }
    params.update({k: v for k, v in optional.items() if v is not None})

    kind = args.kind.lower().replace("-", "_")
    if kind == "radial_fourier":
        # a / b are coefficient lists for this kind
        params.pop("a", None)
        params.pop("b", None)
        if args.coeff_a:
            params["a"] = args.coeff_a
        if args.coeff_b:
            params["b"] = args.coeff_b
    return CurveSpec(kind=kind, params=params, seed=args.seed, n_points=args.n)


def cmd_gen(args: argparse.Namespace) -> int:
    """Generate a curve file and its manifest"""
    manifest = RunManifest("gen", _config_echo(args), __version__)
    if args.spec:
        manifest.add_input(args.spec)

    spec = _spec_from_args(args)
    manifest.config["resolved_spec"] = spec.to_dict()
    curve = generate(spec)

    save_curve(curve, args.out, verbose=not args.quiet)
    manifest.add_output(args.out)
    manifest.finish(EXIT_OK)
    manifest.save(_manifest_path(args.out), verbose=not args.quiet)
    return EXIT_OK


def _write_flow_outputs(
    trajectory: FlowTrajectory,
    args: argparse.Namespace,
    manifest: RunManifest,
    meta: Dict[str, Any],
) -> bool:
    verbose = not args.quiet
    save_trajectory_csv(trajectory, args.out, verbose=verbose)
    manifest.add_output(args.out)

    if trajectory.snapshots:
        svg_dir = args.svg_dir or args.out.with_name(f"{args.out.stem}_svg")
        for path in save_svg_snapshots(trajectory, svg_dir, verbose=verbose):
            manifest.add_output(path)

    report = CurveChecker(verbose=verbose).verify_trajectory(trajectory, meta=meta)
    report_path = args.report or args.out.with_name(f"{args.out.stem}.report.json")
    reporter = ReportGenerator(report, title="Flow Trajectory Report", verbose=verbose)
    manifest.add_output(reporter.save_json(report_path))
    manifest.add_output(reporter.save_markdown(report_path.with_suffix(".md")))

    if verbose:
        tau = trajectory.convexification_time
        print(f"\n{'='*70}")
        print("FLOW COMPLETE" if trajectory.complete else "FLOW ABORTED")
        print(f"{'='*70}")
        print(f"Samples: {len(trajectory.samples)}")
        print(f"Final t: {trajectory.final_state.t:.6g} (T = {trajectory.extinction_time:.6g})")
        print(f"Area-law deviation: {trajectory.area_law_deviation():.3e}")
        print(f"Convexification time: {'-' if tau is None else f'{tau:.6g}'}")
        print(f"Overall: {'✓ PASS' if report.overall_pass else '✗ FAIL'}")
        print(f"{'='*70}\n")

    return report.overall_pass


def cmd_flow(args: argparse.Namespace) -> int:
    """Integrate the flow and export trajectory, snapshots and report"""
    manifest = RunManifest("flow", _config_echo(args), __version__)
    manifest.add_input(args.input)
    curve, reversed_input = load_curve(args.input, verbose=not args.quiet)

    # The snapshot interval needs the extinction time when defaulted
    snapshot_interval = args.svg_every
    if args.svg_dir and snapshot_interval is None:
        area = math.pi if args.normalize else abs(curve.signed_area)
        snapshot_interval = area / (2 * math.pi) / 20

    config = FlowConfig(
        n_points=args.n,
        dt_safety=args.dt_safety,
        resample_every=args.resample_every,
        sample_interval=args.sample_interval,
        stop_area_fraction=args.stop_area_frac,
        normalize=args.normalize,
        snapshot_interval=snapshot_interval,
        pde_residuals=not args.no_pde_residuals,
        max_steps=args.max_steps,
    )
    manifest.config["flow_config"] = config.to_dict()
    meta = {"input": str(args.input), "reversed": reversed_input}

    try:
        trajectory = run(curve, config, progress=not args.quiet)
    except FlowError as e:
        print(f"✗ {e}", file=sys.stderr)
        if e.trajectory is not None and e.trajectory.samples:
            _write_flow_outputs(e.trajectory, args, manifest, meta)
        manifest.finish(EXIT_FAIL, partial=True)
        manifest.save(_manifest_path(args.out), verbose=not args.quiet)
        return EXIT_FAIL

    passed = _write_flow_outputs(trajectory, args, manifest, meta)
    code = EXIT_OK if passed else EXIT_FAIL
    manifest.finish(code)
    manifest.save(_manifest_path(args.out), verbose=not args.quiet)
    return code


def cmd_verify(args: argparse.Namespace) -> int:
    """Verify a curve file or a generated corpus"""
    verbose = not args.quiet
    manifest = RunManifest("verify", _config_echo(args), __version__)
    checker = CurveChecker(grid_resolution=args.grid_resolution, n_points=args.n, verbose=False)

    if args.input:
        manifest.add_input(args.input)
        curve, reversed_input = load_curve(args.input, verbose=verbose)
        checker.verbose = verbose
        if verbose:
            print(f"\n{'='*70}")
            print(f"Verifying: {args.input}")
            print(f"{'='*70}")
        report = checker.verify_curve(curve, meta={"input": str(args.input), "reversed": reversed_input})

        out = args.out or Path("report.json")
        reporter = ReportGenerator(report, verbose=verbose)
        manifest.add_output(reporter.save_json(out))
        manifest.add_output(reporter.save_markdown(out.with_suffix(".md")))

        main_check = report.get("main_inequality")
        margin = main_check.margin if main_check else None
        margin_text = "n/a" if margin is None else f"{margin:.6e}"
        print(f"min_margin={margin_text}, violations: {0 if report.overall_pass else 1}")
        code = EXIT_OK if report.overall_pass else EXIT_FAIL
    else:
        if args.corpus < 1:
            raise ValueError(f"--corpus must be >= 1, got {args.corpus}")
        mix = args.mix or DEFAULT_MIX
        manifest.config["mix"] = mix
        specs = sweep_specs(args.corpus, args.seed, mix, args.n)
        curves = [generate(spec) for spec in specs]

        flow_config = None
        if args.flow:
            flow_config = FlowConfig(
                n_points=args.n,
                dt_safety=args.dt_safety,
                stop_area_fraction=args.stop_area_frac,
                normalize=True,
            )
            manifest.config["flow_config"] = flow_config.to_dict()

        manifest.config["workers"] = default_workers()
        verifier = CorpusVerifier(checker=checker, flow_config=flow_config, verbose=verbose)
        verifier.verify(curves, specs)

        out = args.out or Path("corpus_report.json")
        json_path, md_path = verifier.generate_collective_report(out.parent, stem=out.stem)
        manifest.add_output(json_path)
        manifest.add_output(md_path)
        if verbose:
            verifier.print_summary()

        print(verifier.summary_line())
        code = EXIT_OK if verifier.summary()["violations"] == 0 else EXIT_FAIL

    manifest.finish(code)
    manifest.save(_manifest_path(out), verbose=verbose)
    return code


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the csf-checker CLI"""
    # Load environment variables from .env file
    load_dotenv()

    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        return args.handler(args)
    except GenerationError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FAIL
    except (CurveError, ValueError, FileNotFoundError, json.JSONDecodeError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except KeyboardInterrupt:
        print("\n\nOperation cancelled by user.", file=sys.stderr)
        return EXIT_FAIL
    except Exception as e:
        print(f"Unexpected error: {e}", file=sys.stderr)
        import traceback

        traceback.print_exc()
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
