"""
Inequality and identity checks on curves and flow trajectories.

Each check returns a signed margin. Inequality checks pass when
margin >= -tolerance, identity checks when |margin| <= tolerance.
Exceptions raised inside a check become entries with status "error".
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from scipy.spatial import cKDTree

from curvegeom import (
    ClosedCurve,
    CurveGeometry,
    ResampleMethod,
    compute_geometry,
    curvature_variation,
    divergence_integral,
    find_star_center,
    max_curvature,
    resample_uniform,
    support_margins,
    turning_integral,
    vertex_divergence_sum,
)
from curvegeom.exceptions import (
    CurveValidationError,
    DegenerateCurveError,
    GridResolutionError,
    NotEmbeddedError,
)
from curvegeom.utils import (
    distances_to_edges,
    find_self_intersection,
    grid_inside_mask,
    spacing_variation,
)

from .flow import FlowTrajectory, barrier_monitor

PASS = "pass"
FAIL = "fail"
ERROR = "error"
NOT_APPLICABLE = "not_applicable"


@dataclass
class Tolerances:
    """
    Per-check tolerances, echoed into every report entry

    main_inequality and star_length are floors; the tolerance actually used
    is max(floor, pi^2 / N^2), three times the regular-polygon bias.
    """

    main_inequality: float = 1e-4
    equality_margin: float = 0.01
    roundness: float = 0.05
    star_identity: float = 1e-5
    star_support: float = 1e-9
    star_length: float = 1e-4
    star_isoperimetric: float = 1e-6
    isoperimetric: float = 1e-6
    inscribed_factor: float = 4.0
    turning: float = 1e-3
    divergence: float = 1e-6
    area_law: float = 1e-3
    extinction: float = 1e-2
    length_monotone: float = 0.0
    isoper_monotone: float = 1e-6
    rescaled_floor: float = 5e-3
    barrier_M: float = 0.99
    argmax_concavity: float = 1e-6
    resample_area: float = 1e-8

    def discretization(self, floor: float, n_points: int) -> float:
        return max(floor, np.pi**2 / n_points**2)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass
class CheckResult:
    """One report entry"""

    name: str
    status: str
    margin: Optional[float]
    tolerance: Optional[float]
    details: str = ""

    @property
    def passed(self) -> bool:
        return self.status in (PASS, NOT_APPLICABLE)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "pass": self.passed,
            "status": self.status,
            "margin": _json_number(self.margin),
            "tolerance": _json_number(self.tolerance),
            "details": self.details,
        }


@dataclass
class VerificationReport:
    """Checks run on one curve or trajectory plus its metadata"""

    curve_meta: Dict[str, Any]
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def overall_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def get(self, name: str) -> Optional[CheckResult]:
        for check in self.checks:
            if check.name == name:
                return check
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "curve_meta": {k: _json_number(v) for k, v in self.curve_meta.items()},
            "checks": [c.to_dict() for c in self.checks],
            "overall_pass": self.overall_pass,
        }


@dataclass(frozen=True)
class StarBoundResult:
    """
    Star-shaped bound chain for one curve

    Attributes:
        applicable: False when no star center was found
        center: Witness center (None when not applicable)
        support_margin: min_i (Gamma_i - c) . n_i
        length_margin: (2 k_max A - l) / l
        isoperimetric_margin: l^2 - 4 pi A
    """

    applicable: bool
    center: Optional[np.ndarray]
    support_margin: float
    length_margin: float
    isoperimetric_margin: float


def _json_number(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def _require_embedded(curve: ClosedCurve) -> None:
    pair = find_self_intersection(curve.points)
    if pair is not None:
        raise NotEmbeddedError(
            f"Curve is not embedded: edges {pair[0]} and {pair[1]} intersect"
        )


def _positive_area(geom: CurveGeometry) -> None:
    if geom.enclosed_area <= 0:
        raise DegenerateCurveError(
            f"Enclosed area must be positive (counterclockwise curve), got {geom.enclosed_area:.3e}"
        )


def check_main_inequality(curve: ClosedCurve) -> float:
    """
    Scale-invariant margin k_max * sqrt(A / pi) - 1

    Raises:
        NotEmbeddedError: If the curve self-intersects
        DegenerateCurveError: If the enclosed area is not positive
    """
    _require_embedded(curve)
    geom = compute_geometry(curve)
    _positive_area(geom)
    k_max, _ = max_curvature(geom)
    return k_max * float(np.sqrt(geom.enclosed_area / np.pi)) - 1.0


def star_identity_sum(geom: CurveGeometry, origin=(0.0, 0.0)) -> float:
    """Quadrature of the integral of k (Gamma . n) ds with Gamma measured from origin"""
    support = geom.support_values - geom.outer_normals @ np.asarray(origin, dtype=float)
    return float(np.sum(geom.curvatures * support * geom.vertex_weights))


def check_star_identity(curve: ClosedCurve) -> float:
    """
    Relative residual |sum k_i (Gamma_i . n_i) ds_i - l| / l

    Gamma is measured from the coordinate origin; the identity holds for
    every closed curve.
    """
    geom = compute_geometry(curve)
    total = star_identity_sum(geom)
    return abs(total - geom.total_length) / geom.total_length


def check_star_bound(
    curve: ClosedCurve,
    center: Optional[np.ndarray] = None,
    geom: Optional[CurveGeometry] = None,
) -> StarBoundResult:
    """
    Support, length and isoperimetric margins of the star-shaped bound chain

    Args:
        curve: Curve to check
        center: Star center; searched with find_star_center when omitted
                (the coordinate origin is tried first)
        geom: Precomputed geometry

    Returns:
        StarBoundResult; not applicable when no center is found
    """
    geom = geom or compute_geometry(curve)
    if center is None:
        star = find_star_center(curve, geom, hints=[(0.0, 0.0)])
        if not star.found:
            return StarBoundResult(False, None, star.min_support, np.nan, np.nan)
        center = star.center

    center = np.asarray(center, dtype=float)
    k_max, _ = max_curvature(geom)
    area = geom.enclosed_area
    length = geom.total_length
    return StarBoundResult(
        applicable=True,
        center=center,
        support_margin=float(support_margins(geom, center[None, :])[0]),
        length_margin=(2.0 * k_max * area - length) / length,
        isoperimetric_margin=length * length - 4.0 * np.pi * area,
    )


def check_isoperimetric(curve: ClosedCurve) -> float:
    """l^2 - 4 pi A"""
    return curve.length**2 - 4.0 * np.pi * curve.signed_area


def inscribed_disk_radius(curve: ClosedCurve, grid_resolution: int = 512) -> float:
    """
    Grid lower bound on the inradius

    Over the interior points of a grid_resolution^2 grid on the bounding
    box, the largest distance to the nearest edge. Nearest-vertex distances
    bound the edge distance from below, so exact edge distances are only
    evaluated for points that can still beat the best bound.

    Raises:
        GridResolutionError: If no grid point lies inside the curve
    """
    points = curve.points
    lo, hi = curve.bounding_box
    xs = np.linspace(lo[0], hi[0], grid_resolution)
    ys = np.linspace(lo[1], hi[1], grid_resolution)
    mask = grid_inside_mask(points, xs, ys)
    if not mask.any():
        raise GridResolutionError(
            f"No interior grid point at resolution {grid_resolution}; increase grid_resolution"
        )

    gx, gy = np.meshgrid(xs, ys)
    interior = np.column_stack([gx[mask], gy[mask]])

    vertex_dist, _ = cKDTree(points).query(interior)
    half_edge = 0.5 * float(np.max(curve.edge_lengths))
    lower = np.sqrt(np.maximum(vertex_dist**2 - half_edge**2, 0.0))
    candidates = interior[vertex_dist >= lower.max()]
    return float(np.max(distances_to_edges(points, candidates)))


def detect_equality_case(curve: ClosedCurve) -> float:
    """
    Roundness: coefficient of variation of the curvature field

    Raises:
        CurveValidationError: If the mean curvature is not positive
    """
    geom = compute_geometry(curve)
    roundness = curvature_variation(geom)
    if not np.isfinite(roundness):
        raise CurveValidationError(
            "Mean curvature is not positive; roundness is undefined for this curve"
        )
    return roundness


class CurveChecker:
    """Run every check on curves and trajectories"""

    def __init__(
        self,
        tolerances: Optional[Tolerances] = None,
        grid_resolution: int = 512,
        n_points: Optional[int] = None,
        verbose: bool = False,
    ):
        """
        Initialize the checker

        Args:
            tolerances: Per-check tolerances (defaults: Tolerances())
            grid_resolution: Grid size per side for the inscribed disk
            n_points: Resample input curves to this many points first
            verbose: Print one status line per check
        """
        self.tolerances = tolerances or Tolerances()
        self.grid_resolution = grid_resolution
        self.n_points = n_points
        self.verbose = verbose

    def prepare(self, curve: ClosedCurve) -> ClosedCurve:
        """Spline-resample unless the curve already has the requested uniform spacing"""
        n = self.n_points or len(curve)
        if len(curve) == n and spacing_variation(curve.edge_lengths) <= 0.01:
            return curve
        return resample_uniform(curve, n, ResampleMethod.SPLINE)

    def _run(
        self,
        report: VerificationReport,
        name: str,
        fn: Callable[[], CheckResult],
    ) -> None:
        try:
            result = fn()
        except Exception as e:
            result = CheckResult(name, ERROR, None, None, f"{type(e).__name__}: {e}")
        report.checks.append(result)

        if self.verbose:
            mark = {PASS: "✓", NOT_APPLICABLE: "-", FAIL: "✗", ERROR: "✗"}[result.status]
            margin = "" if result.margin is None else f" margin={result.margin:.3e}"
            print(f"  {mark} {result.name}: {result.status}{margin}")

    @staticmethod
    def _inequality(name: str, margin: float, tol: float, details: str = "") -> CheckResult:
        status = PASS if margin >= -tol else FAIL
        return CheckResult(name, status, float(margin), float(tol), details)

    @staticmethod
    def _identity(name: str, residual: float, tol: float, details: str = "") -> CheckResult:
        status = PASS if abs(residual) <= tol else FAIL
        return CheckResult(name, status, float(residual), float(tol), details)

    def _curve_meta(self, curve: ClosedCurve, geom: CurveGeometry) -> Dict[str, Any]:
        k_max, index = max_curvature(geom)
        return {
            "n_points": curve.n_points,
            "area": geom.enclosed_area,
            "length": geom.total_length,
            "k_max": k_max,
            "k_max_index": index,
        }

    def verify_curve(
        self, curve: ClosedCurve, meta: Optional[Dict[str, Any]] = None
    ) -> VerificationReport:
        """
        Run every static check on a curve

        Args:
            curve: Curve to verify
            meta: Extra metadata merged into curve_meta

        Returns:
            VerificationReport; a non-embedded curve yields a single
            failing "hypotheses" entry
        """
        tol = self.tolerances
        report = VerificationReport(curve_meta=dict(meta or {}))

        try:
            curve = self.prepare(curve)
            _require_embedded(curve)
            geom = compute_geometry(curve)
            _positive_area(geom)
        except (NotEmbeddedError, DegenerateCurveError, CurveValidationError) as e:
            report.curve_meta.setdefault("n_points", curve.n_points)
            report.checks.append(CheckResult("hypotheses", FAIL, None, None, str(e)))
            if self.verbose:
                print(f"  ✗ hypotheses: {e}")
            return report

        report.curve_meta = {**self._curve_meta(curve, geom), **report.curve_meta}
        report.checks.append(
            CheckResult("hypotheses", PASS, None, None, "embedded, counterclockwise, positive area")
        )
        main_tol = tol.discretization(tol.main_inequality, curve.n_points)
        main_margin = check_main_inequality(curve)

        self._run(
            report,
            "main_inequality",
            lambda: self._inequality(
                "main_inequality", main_margin, main_tol, "k_max * sqrt(A / pi) - 1"
            ),
        )
        self._run(report, "equality_case", lambda: self._equality_case(curve, main_margin))
        self._run(
            report,
            "star_identity",
            lambda: self._identity(
                "star_identity",
                check_star_identity(curve.translated(-curve.centroid)),
                tol.star_identity,
                "|sum k (Gamma . n) ds - l| / l about the centroid",
            ),
        )
        self._run(report, "star_bound", lambda: self._star_bound(curve, geom))
        self._run(
            report,
            "isoperimetric",
            lambda: self._inequality(
                "isoperimetric", check_isoperimetric(curve), tol.isoperimetric, "l^2 - 4 pi A"
            ),
        )
        self._run(report, "inscribed_disk", lambda: self._inscribed_disk(curve, geom))
        self._run(
            report,
            "turning_number",
            lambda: self._identity(
                "turning_number",
                turning_integral(geom) - 2.0 * np.pi,
                tol.turning,
                "sum k ds - 2 pi",
            ),
        )
        self._run(report, "divergence_identity", lambda: self._divergence(curve, geom))
        return report

    def _equality_case(self, curve: ClosedCurve, main_margin: float) -> CheckResult:
        tol = self.tolerances
        roundness = detect_equality_case(curve)
        if main_margin >= tol.equality_margin:
            return CheckResult(
                "equality_case",
                NOT_APPLICABLE,
                tol.roundness - roundness,
                0.0,
                f"margin {main_margin:.3e} >= {tol.equality_margin}; roundness {roundness:.4f}",
            )
        return self._inequality(
            "equality_case",
            tol.roundness - roundness,
            0.0,
            f"near-equality (margin {main_margin:.3e}); roundness {roundness:.4e} "
            f"must be < {tol.roundness}",
        )

    def _star_bound(self, curve: ClosedCurve, geom: CurveGeometry) -> CheckResult:
        result = check_star_bound(curve, geom=geom)
        return self._star_entry("star_bound", result, curve.n_points)

    def _star_entry(self, name: str, result: StarBoundResult, n_points: int) -> CheckResult:
        tol = self.tolerances
        if not result.applicable:
            return CheckResult(
                name,
                NOT_APPLICABLE,
                None,
                None,
                f"no star center found (best support {result.support_margin:.3e})",
            )
        length_tol = tol.discretization(tol.star_length, n_points)
        ok = (
            result.support_margin >= -tol.star_support
            and result.length_margin >= -length_tol
            and result.isoperimetric_margin >= -tol.star_isoperimetric
        )
        margin = result.length_margin
        cx, cy = result.center
        return CheckResult(
            name,
            PASS if ok else FAIL,
            margin,
            length_tol,
            f"center ({cx:.4g}, {cy:.4g}); support {result.support_margin:.3e}, "
            f"length {result.length_margin:.3e} (tol {length_tol:.1e}), "
            f"isoperimetric {result.isoperimetric_margin:.3e}",
        )

    def _inscribed_disk(self, curve: ClosedCurve, geom: CurveGeometry) -> CheckResult:
        tol = self.tolerances
        radius = inscribed_disk_radius(curve, self.grid_resolution)
        k_max, _ = max_curvature(geom)
        lo, hi = curve.bounding_box
        grid_tol = tol.inscribed_factor * float(np.linalg.norm(hi - lo)) / self.grid_resolution
        return self._inequality(
            "inscribed_disk",
            radius - 1.0 / k_max,
            grid_tol,
            f"grid inradius {radius:.6g} vs 1/k_max {1.0 / k_max:.6g} "
            f"(grid {self.grid_resolution})",
        )

    def _divergence(self, curve: ClosedCurve, geom: CurveGeometry) -> CheckResult:
        twice_area = 2.0 * geom.enclosed_area
        residual = (vertex_divergence_sum(geom) - twice_area) / twice_area
        edge_residual = (divergence_integral(curve) - twice_area) / twice_area
        mean_edge = float(np.sum(geom.support_values * geom.vertex_weights))
        return self._identity(
            "divergence_identity",
            residual,
            self.tolerances.divergence,
            f"vertex quadrature of Gamma . n ds vs 2A; edge-wise integral residual "
            f"{edge_residual:.3e}, mean-edge weights residual "
            f"{(mean_edge - twice_area) / twice_area:.3e}",
        )

    def verify_trajectory(
        self, trajectory: FlowTrajectory, meta: Optional[Dict[str, Any]] = None
    ) -> VerificationReport:
        """
        Run every trajectory check

        Covers the area law, extinction estimate, length and isoperimetric
        monotonicity, rescaled curvature floor, barrier and argmax concavity,
        per-sample main inequality and star bound, convexification and
        resampling area drift.
        """
        tol = self.tolerances
        samples = trajectory.samples
        first = samples[0]
        n = first.curve.n_points

        drifts = np.array([s.rescale_drift for s in samples])
        pde = [s.pde_rms for s in samples if s.pde_rms is not None]
        report = VerificationReport(
            curve_meta={
                "n_points": n,
                "area": first.area,
                "length": first.length,
                "k_max": first.k_max,
                "k_max_index": first.k_max_index,
                "n_samples": len(samples),
                **trajectory.summary(),
                "max_rescale_drift": float(np.nanmax(np.abs(drifts))) if len(drifts) else None,
                "median_pde_rms": float(np.median(pde)) if pde else None,
                **(meta or {}),
            }
        )

        if trajectory.complete:
            report.checks.append(
                CheckResult("hypotheses", PASS, None, None, "embedded at every sample")
            )
        else:
            report.checks.append(
                CheckResult(
                    "hypotheses",
                    FAIL,
                    None,
                    None,
                    f"run aborted at t={trajectory.final_state.t:.6g}; samples are partial",
                )
            )

        self._run(
            report,
            "area_law",
            lambda: self._identity(
                "area_law",
                trajectory.area_law_deviation(),
                tol.area_law,
                "max |A(t) - (A(0) - 2 pi t)| / A(0)",
            ),
        )
        self._run(report, "extinction_time", lambda: self._extinction(trajectory))
        self._run(
            report,
            "length_monotone",
            lambda: self._inequality(
                "length_monotone",
                float(np.min(-np.diff(trajectory.lengths))) if len(samples) > 1 else 0.0,
                tol.length_monotone,
                "smallest decrease of l between samples",
            ),
        )
        self._run(report, "isoperimetric_monotone", lambda: self._isoper_monotone(trajectory))
        self._run(
            report,
            "isoperimetric_floor",
            lambda: self._inequality(
                "isoperimetric_floor",
                float(np.min(trajectory.isoper_ratios)) - 1.0,
                tol.isoper_monotone,
                "min l^2 / (4 pi A) - 1",
            ),
        )
        self._run(
            report,
            "rescaled_curvature_floor",
            lambda: self._inequality(
                "rescaled_curvature_floor",
                min(s.K_max for s in samples) - 1.0,
                tol.rescaled_floor,
                "min over samples of K_max - 1",
            ),
        )
        self._run(report, "barrier", lambda: self._barrier(trajectory))
        self._run(report, "argmax_concavity", lambda: self._concavity(trajectory))
        self._run(
            report,
            "main_inequality_samples",
            lambda: self._inequality(
                "main_inequality_samples",
                min(s.K_max for s in samples) - 1.0,
                tol.discretization(tol.main_inequality, n),
                "min over samples of k_max * sqrt(A / pi) - 1",
            ),
        )
        self._run(report, "star_bound_samples", lambda: self._star_samples(trajectory))
        self._run(report, "convexification", lambda: self._convexification(trajectory))
        self._run(
            report,
            "resample_area",
            lambda: self._inequality(
                "resample_area",
                tol.resample_area - trajectory.max_resample_area_change,
                0.0,
                f"largest relative area change over {trajectory.n_resamples} resampling events "
                f"must be <= {tol.resample_area:g}",
            ),
        )
        return report

    def _isoper_monotone(self, trajectory: FlowTrajectory) -> CheckResult:
        ratios = trajectory.isoper_ratios
        if len(ratios) < 2:
            return CheckResult(
                "isoperimetric_monotone", NOT_APPLICABLE, None, None, "fewer than two samples"
            )
        drops = -np.diff(ratios)
        return self._inequality(
            "isoperimetric_monotone",
            float(drops.min()),
            self.tolerances.isoper_monotone,
            f"smallest decrease of l^2 / (4 pi A) over {len(drops)} consecutive sample pairs",
        )

    def _extinction(self, trajectory: FlowTrajectory) -> CheckResult:
        estimate = trajectory.extinction_estimate
        expected = trajectory.extinction_time
        if estimate is None:
            return CheckResult(
                "extinction_time", NOT_APPLICABLE, None, None, "fewer than two samples"
            )
        return self._identity(
            "extinction_time",
            (estimate - expected) / expected,
            self.tolerances.extinction,
            f"extrapolated {estimate:.6g} vs A(0) / (2 pi) = {expected:.6g}",
        )

    def _barrier(self, trajectory: FlowTrajectory) -> CheckResult:
        barrier = barrier_monitor(
            trajectory, self.tolerances.barrier_M, self.tolerances.argmax_concavity
        )
        return CheckResult(
            "barrier",
            FAIL if barrier.crossed else PASS,
            barrier.min_K_max - barrier.M,
            0.0,
            f"K_max < {barrier.M} never held; min K_max {barrier.min_K_max:.6f} "
            f"at t={barrier.min_K_time:.6g}"
            if not barrier.crossed
            else f"K_max fell below {barrier.M} (min {barrier.min_K_max:.6f} "
            f"at t={barrier.min_K_time:.6g})",
        )

    def _concavity(self, trajectory: FlowTrajectory) -> CheckResult:
        barrier = barrier_monitor(
            trajectory, self.tolerances.barrier_M, self.tolerances.argmax_concavity
        )
        return self._inequality(
            "argmax_concavity",
            -barrier.worst_concavity,
            barrier.concavity_tol,
            "max over samples of (d2k/ds2 at the argmax) / max|k|",
        )

    def _star_samples(self, trajectory: FlowTrajectory) -> CheckResult:
        entries = []
        skipped = 0
        for s in trajectory.samples:
            result = check_star_bound(s.curve)
            if not result.applicable:
                skipped += 1
                continue
            entries.append((s.t, self._star_entry("star_bound", result, s.curve.n_points)))

        if not entries:
            return CheckResult(
                "star_bound_samples",
                NOT_APPLICABLE,
                None,
                None,
                f"no star center found at any of {skipped} samples",
            )

        failed = [(t, e) for t, e in entries if not e.passed]
        worst_t, worst = min(entries, key=lambda te: te[1].margin)
        details = (
            f"checked {len(entries)} samples, not applicable at {skipped}; "
            f"worst at t={worst_t:.6g}: {worst.details}"
        )
        return CheckResult(
            "star_bound_samples",
            FAIL if failed else PASS,
            worst.margin,
            worst.tolerance,
            details,
        )

    def _convexification(self, trajectory: FlowTrajectory) -> CheckResult:
        tau = trajectory.convexification_time
        final_t = trajectory.final_state.t
        if tau is None:
            return CheckResult(
                "convexification",
                FAIL,
                None,
                None,
                f"curve not convex at the stop time t={final_t:.6g}",
            )
        margin = (final_t - tau) / final_t if final_t > 0 else 0.0
        return CheckResult(
            "convexification",
            PASS,
            margin,
            0.0,
            f"convex for every sample from t={tau:.6g} (stop at {final_t:.6g})",
        )


def verify_curve(curve: ClosedCurve, **kwargs) -> VerificationReport:
    """Convenience wrapper around CurveChecker.verify_curve"""
    return CurveChecker(**kwargs).verify_curve(curve)


def verify_trajectory(trajectory: FlowTrajectory, **kwargs) -> VerificationReport:
    """Convenience wrapper around CurveChecker.verify_trajectory"""
    return CurveChecker(**kwargs).verify_trajectory(trajectory)
