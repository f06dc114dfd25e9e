"""
Curve shortening flow integrator.

Explicit Euler integration of dC/dt = -k n on uniformly resampled closed
polylines, with periodic spline resampling, trajectory sampling, the
area-normalised (rescaled) view of the flow and the diagnostics built on it.
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from curvegeom import (
    ClosedCurve,
    CurveGeometry,
    ResampleMethod,
    compute_geometry,
    curvature_variation,
    is_convex,
    is_embedded,
    max_curvature,
    normalize_area,
    resample_uniform,
    second_arc_derivative,
)
from curvegeom.exceptions import (
    CorrespondenceError,
    CurveValidationError,
    DegenerateCurveError,
    FlowEmbeddednessError,
    FlowError,
    NotEmbeddedError,
)
from curvegeom.utils import spacing_variation

CONVEX_TOL_FACTOR = 1e-6


@dataclass
class FlowConfig:
    """
    Integrator settings

    Attributes:
        n_points: Vertex count maintained by resampling
        dt_safety: Fraction of the stability limit used per step, in (0, 1]
        resample_every: Steps between resampling events
        sample_interval: Flow time between trajectory samples
                         (None: one hundredth of the extinction time)
        stop_area_fraction: Integration halts once A(t) <= fraction * A(0)
        normalize: Scale the initial curve to area pi before integrating
        max_spacing_variation: Resample early when edge spacing drifts past this
        snapshot_interval: Flow time between stored curve snapshots (None: off)
        pde_residuals: Record the curvature-PDE residual at every sample
        max_steps: Hard limit on the number of Euler steps
    """

    n_points: int = 512
    dt_safety: float = 0.25
    resample_every: int = 10
    sample_interval: Optional[float] = None
    stop_area_fraction: float = 0.1
    normalize: bool = False
    max_spacing_variation: float = 0.005
    snapshot_interval: Optional[float] = None
    pde_residuals: bool = True
    max_steps: int = 5_000_000

    def __post_init__(self):
        if self.n_points < 8:
            raise ValueError(f"n_points must be >= 8, got {self.n_points}")
        if not 0.0 < self.dt_safety <= 1.0:
            raise ValueError(f"dt_safety must be in (0, 1], got {self.dt_safety}")
        if not 0.0 < self.stop_area_fraction < 1.0:
            raise ValueError(
                f"stop_area_fraction must be in (0, 1), got {self.stop_area_fraction}"
            )
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps}")
        if self.resample_every < 1:
            raise ValueError(f"resample_every must be >= 1, got {self.resample_every}")
        if self.sample_interval is not None and self.sample_interval <= 0:
            raise ValueError(f"sample_interval must be positive, got {self.sample_interval}")
        if self.snapshot_interval is not None and self.snapshot_interval <= 0:
            raise ValueError(
                f"snapshot_interval must be positive, got {self.snapshot_interval}"
            )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class FlowState:
    """
    A curve at flow time t

    Attributes:
        curve: Current polyline
        geom: Its geometry
        t: Elapsed flow time
        initial_area: A(0)
        steps: Euler steps taken so far
        epoch: Resampling events so far; vertex correspondence holds only
               between states of the same epoch
        resample_area_change: Relative area change of the resampling event
                              that produced this state, if any
    """

    curve: ClosedCurve
    geom: CurveGeometry
    t: float
    initial_area: float
    steps: int = 0
    epoch: int = 0
    resample_area_change: Optional[float] = None

    @classmethod
    def initial(cls, curve: ClosedCurve) -> "FlowState":
        geom = compute_geometry(curve, spacing_tol=None)
        return cls(curve=curve, geom=geom, t=0.0, initial_area=geom.enclosed_area)

    @property
    def extinction_time(self) -> float:
        """A(0) / (2 pi)"""
        return self.initial_area / (2.0 * np.pi)

    @property
    def area(self) -> float:
        return self.geom.enclosed_area


@dataclass(frozen=True, eq=False)
class FlowSample:
    """Scalar diagnostics of one trajectory sample plus the curve snapshot"""

    t: float
    area: float
    length: float
    k_max: float
    K_max: float
    isoper_ratio: float
    convex: bool
    k_max_index: int
    max_abs_curvature: float
    argmax_second_derivative: float
    roundness: float
    rescale_drift: float
    pde_rms: Optional[float]
    steps: int
    epoch: int
    curve: ClosedCurve = field(repr=False)

    CSV_COLUMNS = ("t", "area", "length", "k_max", "K_max", "isoper_ratio", "convex")

    def to_row(self) -> Dict[str, Any]:
        """Row for the trajectory CSV"""
        return {
            "t": self.t,
            "area": self.area,
            "length": self.length,
            "k_max": self.k_max,
            "K_max": self.K_max,
            "isoper_ratio": self.isoper_ratio,
            "convex": int(self.convex),
        }

    def to_dict(self) -> Dict[str, Any]:
        data = self.to_row()
        data.update(
            {
                "convex": self.convex,
                "k_max_index": self.k_max_index,
                "argmax_second_derivative": self.argmax_second_derivative,
                "roundness": self.roundness,
                "rescale_drift": self.rescale_drift,
                "pde_rms": self.pde_rms,
                "steps": self.steps,
            }
        )
        return data


@dataclass
class FlowTrajectory:
    """
    Time-ordered samples of a flow run

    Attributes:
        samples: Samples with strictly increasing t
        final_state: State at which integration stopped
        convexification_time: First sample time from which every later
                              sample is convex, or None
        config: Settings the run used
        extinction_estimate: Zero of the least-squares line through (t, A)
        max_resample_area_change: Largest relative area change of any
                                  resampling event
        n_resamples: Number of resampling events
        snapshots: (t, curve) pairs at multiples of snapshot_interval
        complete: False when the run aborted early
    """

    samples: List[FlowSample]
    final_state: FlowState
    convexification_time: Optional[float]
    config: FlowConfig
    extinction_estimate: Optional[float] = None
    max_resample_area_change: float = 0.0
    n_resamples: int = 0
    snapshots: List[Tuple[float, ClosedCurve]] = field(default_factory=list)
    complete: bool = True

    @property
    def initial_area(self) -> float:
        return self.final_state.initial_area

    @property
    def extinction_time(self) -> float:
        return self.final_state.extinction_time

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def areas(self) -> np.ndarray:
        return np.array([s.area for s in self.samples])

    @property
    def lengths(self) -> np.ndarray:
        return np.array([s.length for s in self.samples])

    @property
    def isoper_ratios(self) -> np.ndarray:
        return np.array([s.isoper_ratio for s in self.samples])

    @property
    def final_roundness(self) -> float:
        return self.samples[-1].roundness if self.samples else float("nan")

    def area_law_deviation(self) -> float:
        """max_t |A(t) - (A(0) - 2 pi t)| / A(0) over the samples"""
        expected = self.initial_area - 2.0 * np.pi * self.times
        return float(np.max(np.abs(self.areas - expected)) / self.initial_area)

    def summary(self) -> Dict[str, Any]:
        return {
            "n_samples": len(self.samples),
            "initial_area": self.initial_area,
            "extinction_time": self.extinction_time,
            "extinction_estimate": self.extinction_estimate,
            "final_t": self.final_state.t,
            "final_area": self.final_state.area,
            "convexification_time": self.convexification_time,
            "final_roundness": self.final_roundness,
            "max_resample_area_change": self.max_resample_area_change,
            "n_resamples": self.n_resamples,
            "steps": self.final_state.steps,
            "complete": self.complete,
        }


@dataclass(frozen=True)
class BarrierReport:
    """
    Rescaled-curvature barrier diagnostics

    Attributes:
        M: Barrier level in (0, 1)
        min_K_max: Smallest rescaled maximum curvature over the samples
        min_K_time: Sample time where it occurred
        crossed: True if K_max < M held at any sample
        worst_concavity: Largest (d2k/ds2 at the argmax) / max|k| over samples
        concavity_ok: worst_concavity <= concavity_tol
        concavity_tol: Relative tolerance for the argmax concavity
    """

    M: float
    min_K_max: float
    min_K_time: float
    crossed: bool
    worst_concavity: float
    concavity_ok: bool
    concavity_tol: float


def stable_dt(state: FlowState, config: FlowConfig) -> float:
    """
    Explicit-scheme time step: dt_safety * min(ds^2, ds / max|k|) / 2

    Args:
        state: Current state (ds is its mean edge length)
        config: Supplies dt_safety

    Returns:
        Positive time step
    """
    ds = state.geom.spacing
    k_abs = state.geom.max_abs_curvature
    limit = ds * ds if k_abs == 0.0 else min(ds * ds, ds / k_abs)
    return config.dt_safety * limit / 2.0


def step(
    state: FlowState,
    dt: float,
    config: Optional[FlowConfig] = None,
    check_embedded: bool = False,
) -> FlowState:
    """
    Advance one explicit Euler step of dC/dt = -k n

    Args:
        state: Current state
        dt: Time step (should not exceed stable_dt)
        config: When given, resample to config.n_points every
                config.resample_every steps or when spacing drifts; the
                resampled curve is scaled about its centroid back to the
                area it had before resampling
        check_embedded: Verify embeddedness of the new curve

    Returns:
        New state

    Raises:
        FlowError: If a vertex collapses onto its neighbour
        FlowEmbeddednessError: If check_embedded and the curve self-intersects
    """
    if dt <= 0:
        raise ValueError(f"Time step must be positive, got {dt}")

    geom = state.geom
    moved = geom.points - dt * geom.curvatures[:, None] * geom.outer_normals
    try:
        curve = ClosedCurve(moved)
    except CurveValidationError as e:
        raise FlowError(f"Step at t={state.t:.6g} produced an invalid curve: {e}")

    steps = state.steps + 1
    epoch = state.epoch
    area_change = None

    if config is not None and (
        steps % config.resample_every == 0
        or spacing_variation(curve.edge_lengths) > config.max_spacing_variation
    ):
        before = curve.signed_area
        curve = resample_uniform(curve, config.n_points, ResampleMethod.SPLINE)
        ratio = before / curve.signed_area
        if ratio > 0:
            curve = curve.scaled(float(np.sqrt(ratio)))
        area_change = abs(curve.signed_area - before) / abs(before)
        epoch += 1

    if check_embedded and not is_embedded(curve):
        raise FlowEmbeddednessError(
            f"Curve lost embeddedness at t={state.t + dt:.6g} (step {steps}); "
            "reduce dt_safety or increase n_points"
        )

    return FlowState(
        curve=curve,
        geom=compute_geometry(curve, spacing_tol=None),
        t=state.t + dt,
        initial_area=state.initial_area,
        steps=steps,
        epoch=epoch,
        resample_area_change=area_change,
    )


def pde_residual(earlier: FlowState, later: FlowState) -> np.ndarray:
    """
    Residual of dk/dt = d2k/ds2 + k^3 between two corresponding states

    r_i = (k_i(later) - k_i(earlier)) / dt - (d2k/ds2)_i - k_i^3, with the
    spatial terms evaluated on the earlier state.

    Raises:
        CorrespondenceError: If a resampling event separates the states or
                             they are not in time order
    """
    if earlier.epoch != later.epoch:
        raise CorrespondenceError(
            f"States straddle a resampling event (epochs {earlier.epoch} and "
            f"{later.epoch}); vertex correspondence is broken"
        )
    if earlier.curve.n_points != later.curve.n_points:
        raise CorrespondenceError(
            f"Vertex counts differ ({earlier.curve.n_points} vs {later.curve.n_points})"
        )
    dt = later.t - earlier.t
    if dt <= 0:
        raise CorrespondenceError(f"States are not in time order (dt={dt:.3e})")

    k0 = earlier.geom.curvatures
    k1 = later.geom.curvatures
    return (k1 - k0) / dt - second_arc_derivative(earlier.geom) - k0**3


def rescaled_curve(state: FlowState) -> ClosedCurve:
    """
    The state's curve scaled about its centroid to enclose area pi

    Uses the measured area rather than the factor 1 / sqrt(1 - 2t).

    Raises:
        DegenerateCurveError: If the measured area is not positive
    """
    return normalize_area(state.curve, np.pi)


def rescale_drift(state: FlowState) -> float:
    """
    Measured rescale factor over the area-law factor, minus one

    Both factors map the curve to area pi: sqrt(pi / A(t)) against
    sqrt(pi / (A(0) - 2 pi t)).
    """
    theoretical_area = state.initial_area - 2.0 * np.pi * state.t
    if theoretical_area <= 0 or state.area <= 0:
        return float("nan")
    return float(np.sqrt(theoretical_area / state.area) - 1.0)


def barrier_monitor(
    trajectory: FlowTrajectory, M: float = 0.99, concavity_tol: float = 1e-6
) -> BarrierReport:
    """
    Check the rescaled curvature barrier and the argmax concavity

    Args:
        trajectory: Flow trajectory
        M: Barrier level; K_max < M must never hold
        concavity_tol: Allowed d2k/ds2 at the argmax, relative to max|k|

    Returns:
        BarrierReport
    """
    if not 0.0 < M < 1.0:
        raise ValueError(f"Barrier level M must be in (0, 1), got {M}")
    if not trajectory.samples:
        raise ValueError("Trajectory has no samples")

    K = np.array([s.K_max for s in trajectory.samples])
    i = int(np.argmin(K))
    concavity = np.array(
        [s.argmax_second_derivative / s.max_abs_curvature for s in trajectory.samples]
    )
    worst = float(np.max(concavity))

    return BarrierReport(
        M=M,
        min_K_max=float(K[i]),
        min_K_time=trajectory.samples[i].t,
        crossed=bool(np.any(K < M)),
        worst_concavity=worst,
        concavity_ok=worst <= concavity_tol,
        concavity_tol=concavity_tol,
    )


def _sample(state: FlowState, config: FlowConfig) -> FlowSample:
    geom = state.geom
    k_max, index = max_curvature(geom)
    area = geom.enclosed_area
    length = geom.total_length
    k_abs = geom.max_abs_curvature

    pde_rms = None
    if config.pde_residuals:
        shadow = step(state, stable_dt(state, config))
        pde_rms = float(np.sqrt(np.mean(pde_residual(state, shadow) ** 2)))

    return FlowSample(
        t=state.t,
        area=area,
        length=length,
        k_max=k_max,
        K_max=k_max * float(np.sqrt(area / np.pi)),
        isoper_ratio=length * length / (4.0 * np.pi * area),
        convex=is_convex(geom, CONVEX_TOL_FACTOR * k_abs),
        k_max_index=index,
        max_abs_curvature=k_abs,
        argmax_second_derivative=float(second_arc_derivative(geom)[index]),
        roundness=curvature_variation(geom),
        rescale_drift=rescale_drift(state),
        pde_rms=pde_rms,
        steps=state.steps,
        epoch=state.epoch,
        curve=state.curve,
    )


def convexification_time(samples: List[FlowSample]) -> Optional[float]:
    """First sample time from which every later sample is convex"""
    tau = None
    for s in reversed(samples):
        if not s.convex:
            break
        tau = s.t
    return tau


def extinction_estimate(samples: List[FlowSample]) -> Optional[float]:
    """Zero crossing of the least-squares line through the sampled (t, A)"""
    if len(samples) < 2:
        return None
    t = np.array([s.t for s in samples])
    a = np.array([s.area for s in samples])
    slope, intercept = np.polyfit(t, a, 1)
    if slope >= 0:
        return None
    return float(-intercept / slope)


def _trajectory(
    samples: List[FlowSample],
    state: FlowState,
    config: FlowConfig,
    area_changes: List[float],
    snapshots: List[Tuple[float, ClosedCurve]],
    complete: bool,
) -> FlowTrajectory:
    return FlowTrajectory(
        samples=samples,
        final_state=state,
        convexification_time=convexification_time(samples),
        config=config,
        extinction_estimate=extinction_estimate(samples),
        max_resample_area_change=max(area_changes, default=0.0),
        n_resamples=len(area_changes),
        snapshots=snapshots,
        complete=complete,
    )


def run(
    initial: ClosedCurve,
    config: Optional[FlowConfig] = None,
    progress: bool = False,
) -> FlowTrajectory:
    """
    Integrate the curve shortening flow until the area stop condition

    The initial curve is spline-resampled to config.n_points (and scaled
    to area pi when config.normalize is set). Samples are taken at t = 0,
    every sample_interval, and at the stop time; embeddedness is checked
    at every sample.

    Args:
        initial: Embedded curve with positive area
        config: Integrator settings (defaults: FlowConfig())
        progress: Show a tqdm bar of the area consumed

    Returns:
        FlowTrajectory

    Raises:
        NotEmbeddedError: If the initial curve self-intersects
        DegenerateCurveError: If the initial area is not positive
        FlowEmbeddednessError: If embeddedness is lost
        FlowError: On any failure during integration, including the step
                   limit; the partial trajectory is attached
    """
    config = config or FlowConfig()

    curve = resample_uniform(initial, config.n_points, ResampleMethod.SPLINE)
    if not is_embedded(curve):
        raise NotEmbeddedError("Initial curve is not embedded; the flow needs a Jordan curve")
    if curve.signed_area <= 0:
        raise DegenerateCurveError(
            f"Initial curve must enclose positive area, got {curve.signed_area:.3e}"
        )
    if config.normalize:
        curve = normalize_area(curve, np.pi)

    state = FlowState.initial(curve)
    a0 = state.initial_area
    stop_area = config.stop_area_fraction * a0
    interval = config.sample_interval or state.extinction_time / 100.0
    snap_interval = config.snapshot_interval

    samples = [_sample(state, config)]
    snapshots: List[Tuple[float, ClosedCurve]] = []
    if snap_interval:
        snapshots.append((0.0, curve))
    area_changes: List[float] = []

    next_sample = interval
    next_snapshot = snap_interval if snap_interval else np.inf

    pbar = tqdm(
        total=round(1.0 - config.stop_area_fraction, 6),
        desc="Flow",
        unit="A0",
        ncols=100,
        disable=not progress,
        bar_format="{l_bar}{bar}| {n:.3f}/{total:.3f} A0 [{elapsed}<{remaining}]",
    )
    try:
        while True:
            if state.steps >= config.max_steps:
                raise FlowError(
                    f"Step limit {config.max_steps} reached at t={state.t:.6g} "
                    f"(area {state.area / a0:.1%} of initial)"
                )

            dt = stable_dt(state, config)
            target = min(next_sample, next_snapshot)
            landing = state.t + dt >= target
            hit_sample = landing and next_sample == target
            hit_snapshot = landing and next_snapshot == target
            if landing:
                dt = target - state.t

            previous_area = state.area
            state = step(state, dt, config)
            if state.resample_area_change is not None:
                area_changes.append(state.resample_area_change)
            pbar.update(max(previous_area - state.area, 0.0) / a0)

            stopped = state.area <= stop_area
            if not (landing or stopped):
                continue

            if not is_embedded(state.curve):
                raise FlowEmbeddednessError(
                    f"Curve lost embeddedness at t={state.t:.6g} after {state.steps} steps"
                )

            if stopped:
                samples.append(_sample(state, config))
                break

            if hit_sample:
                samples.append(_sample(state, config))
                next_sample += interval
            if hit_snapshot:
                snapshots.append((state.t, state.curve))
                next_snapshot += snap_interval
    except FlowError as e:
        if e.trajectory is None:
            e.trajectory = _trajectory(
                samples, state, config, area_changes, snapshots, complete=False
            )
        raise
    finally:
        pbar.close()

    return _trajectory(samples, state, config, area_changes, snapshots, complete=True)
