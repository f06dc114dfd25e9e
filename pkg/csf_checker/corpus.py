"""
Deterministic generators of test curves.

Every random draw comes from NumPy's PCG64 bit generator seeded with the
spec's seed, so identical specs give identical curves. Analytic shapes are
sampled at equal arc length of the exact curve.
"""

from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from curvegeom import (
    ClosedCurve,
    CurveGeometry,
    compute_geometry,
    is_convex,
    is_embedded,
)
from curvegeom.exceptions import CurveError, CurveSpecError, GenerationError

DENSE_FACTOR = 64
DEFAULT_ATTEMPTS = 1000
REFERENCE_POINTS = 512
MAX_TURN_PER_VERTEX = 0.05
NONCONVEX_MARGIN = 0.01
DEFAULT_MIX = {"convex": 0.2, "star": 0.4, "general": 0.4}
SWEEP_CATEGORIES = ("circle", "convex", "star", "general")
PRESETS = ("bean", "kidney")

Parametric = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]


class CurveKind(Enum):
    """Curve families the generator knows"""

    CIRCLE = "circle"
    ELLIPSE = "ellipse"
    RADIAL_FOURIER = "radial_fourier"
    PLANAR_FOURIER = "planar_fourier"
    PRESET = "preset"

    @classmethod
    def parse(cls, value: str) -> "CurveKind":
        try:
            return cls(value.strip().lower().replace("-", "_"))
        except ValueError:
            kinds = ", ".join(k.value for k in cls)
            raise CurveSpecError(f"Unknown curve kind '{value}' (expected one of: {kinds})")


@dataclass
class CurveSpec:
    """
    Recipe for one generated curve

    Parameters by kind:
        circle: radius (1.0), center ([0, 0])
        ellipse: a (2.0), b (1.0), rotation (0.0), center ([0, 0])
        radial_fourier: r0 (1.0), a and b (cosine / sine coefficient lists,
            entry m-1 multiplies mode m); without coefficients they are drawn
            at random from modes (5) and amplitude (0.4, fraction of r0)
        planar_fourier: modes (5); coefficients drawn at random, rejected
            until the curve is embedded and resolved (max |k| * spacing <= 0.05
            at 512 points, so the accepted shape does not depend on n_points)
        preset: name ("bean" or "kidney")
    """

    kind: CurveKind
    params: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    n_points: int = 512

    def __post_init__(self):
        if isinstance(self.kind, str):
            self.kind = CurveKind.parse(self.kind)
        if self.n_points < 8:
            raise CurveSpecError(f"n_points must be >= 8, got {self.n_points}")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["kind"] = self.kind.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CurveSpec":
        if "kind" not in data:
            raise CurveSpecError('Curve spec needs a "kind" field')
        return cls(
            kind=data["kind"],
            params=dict(data.get("params", {})),
            seed=int(data.get("seed", 0)),
            n_points=int(data.get("n_points", 512)),
        )


def make_rng(seed: int) -> np.random.Generator:
    """PCG64-backed generator"""
    return np.random.Generator(np.random.PCG64(seed))


def sample_equal_arc(fn: Parametric, n: int, dense_factor: int = DENSE_FACTOR) -> ClosedCurve:
    """
    Sample a 2pi-periodic parametric curve at n points of equal arc length

    A dense parameter table gives the arc length as a function of theta; the
    n target arc positions are mapped back to theta and evaluated exactly.
    """
    m = dense_factor * n
    theta = np.linspace(0.0, 2.0 * np.pi, m + 1)
    x, y = fn(theta)
    s = np.concatenate([[0.0], np.cumsum(np.hypot(np.diff(x), np.diff(y)))])
    targets = np.arange(n) * (s[-1] / n)
    x, y = fn(np.interp(targets, s, theta))
    return ClosedCurve(np.column_stack([x, y]))


def _positively_oriented(curve: ClosedCurve) -> ClosedCurve:
    return curve.reversed() if curve.signed_area < 0 else curve


def reference_geometry(fn: Parametric) -> Optional[CurveGeometry]:
    """
    Geometry of fn sampled at REFERENCE_POINTS, or None if it is not usable

    Rejection filters look at this sampling only, so a seed selects the
    same shape at every n_points. Edge spacing is not checked here.
    """
    try:
        reference = sample_equal_arc(fn, REFERENCE_POINTS)
    except CurveError:
        return None
    if reference.signed_area == 0 or not is_embedded(reference):
        return None
    geom = compute_geometry(reference, spacing_tol=None)
    if geom.max_abs_curvature * geom.spacing > MAX_TURN_PER_VERTEX:
        return None
    return geom


def _float_list(params: Dict[str, Any], key: str) -> np.ndarray:
    return np.asarray(params.get(key, []), dtype=float).ravel()


def _circle(spec: CurveSpec) -> ClosedCurve:
    r = float(spec.params.get("radius", spec.params.get("r", 1.0)))
    if r <= 0:
        raise CurveSpecError(f"circle radius must be positive, got {r}")
    cx, cy = spec.params.get("center", (0.0, 0.0))
    return sample_equal_arc(lambda t: (cx + r * np.cos(t), cy + r * np.sin(t)), spec.n_points)


def _ellipse(spec: CurveSpec) -> ClosedCurve:
    a = float(spec.params.get("a", 2.0))
    b = float(spec.params.get("b", 1.0))
    if a <= 0 or b <= 0:
        raise CurveSpecError(f"ellipse semi-axes must be positive, got a={a}, b={b}")
    rot = float(spec.params.get("rotation", 0.0))
    cx, cy = spec.params.get("center", (0.0, 0.0))
    c, s = np.cos(rot), np.sin(rot)

    def fn(t):
        x, y = a * np.cos(t), b * np.sin(t)
        return cx + c * x - s * y, cy + s * x + c * y

    return sample_equal_arc(fn, spec.n_points)


def _radial_coefficients(spec: CurveSpec, rng: np.random.Generator) -> Tuple[float, np.ndarray, np.ndarray]:
    r0 = float(spec.params.get("r0", 1.0))
    if r0 <= 0:
        raise CurveSpecError(f"radial_fourier base radius r0 must be positive, got {r0}")

    a = _float_list(spec.params, "a")
    b = _float_list(spec.params, "b")
    if len(a) == 0 and len(b) == 0:
        modes = int(spec.params.get("modes", 5))
        amplitude = float(spec.params.get("amplitude", 0.4))
        if modes < 1:
            raise CurveSpecError(f"radial_fourier needs modes >= 1, got {modes}")
        if not 0.0 < amplitude < 1.0:
            raise CurveSpecError(
                f"radial_fourier amplitude must be in (0, 1) as a fraction of r0, got {amplitude}"
            )
        m = np.arange(1, modes + 1)
        a = rng.normal(size=modes) / m
        b = rng.normal(size=modes) / m
        scale = amplitude * r0 / (np.sum(np.abs(a)) + np.sum(np.abs(b)))
        a, b = a * scale, b * scale

    total = float(np.sum(np.abs(a)) + np.sum(np.abs(b)))
    if total >= r0:
        raise CurveSpecError(
            f"radial_fourier requires sum of |coefficients| < r0 "
            f"(got {total:.6g} >= r0 = {r0:.6g})"
        )
    return r0, a, b


def _radial_fn(r0: float, a: np.ndarray, b: np.ndarray) -> Parametric:
    size = max(len(a), len(b))
    a = np.pad(a, (0, size - len(a)))
    b = np.pad(b, (0, size - len(b)))
    modes = np.arange(1, size + 1)

    def fn(t):
        mt = np.outer(t, modes)
        r = r0 + np.cos(mt) @ a + np.sin(mt) @ b
        return r * np.cos(t), r * np.sin(t)

    return fn


def _radial_fourier(spec: CurveSpec, rng: np.random.Generator) -> ClosedCurve:
    r0, a, b = _radial_coefficients(spec, rng)
    return sample_equal_arc(_radial_fn(r0, a, b), spec.n_points)


def _planar_fourier(spec: CurveSpec, rng: np.random.Generator) -> ClosedCurve:
    modes = int(spec.params.get("modes", 5))
    if modes < 2:
        raise CurveSpecError(f"planar_fourier needs modes >= 2, got {modes}")
    attempts = int(spec.params.get("attempts", DEFAULT_ATTEMPTS))
    m = np.arange(2, modes + 1)
    sigma = 0.25 / m**1.5

    for attempt in range(1, attempts + 1):
        coeffs = rng.normal(size=(4, len(m))) * sigma

        def fn(t, coeffs=coeffs):
            mt = np.outer(t, m)
            cos_mt, sin_mt = np.cos(mt), np.sin(mt)
            x = np.cos(t) + cos_mt @ coeffs[0] + sin_mt @ coeffs[1]
            y = np.sin(t) + cos_mt @ coeffs[2] + sin_mt @ coeffs[3]
            return x, y

        if reference_geometry(fn) is None:
            continue
        try:
            curve = sample_equal_arc(fn, spec.n_points)
        except CurveError:
            continue
        if curve.signed_area != 0 and is_embedded(curve):
            return _positively_oriented(curve)

    raise GenerationError(
        f"planar_fourier: no embedded, resolved curve in {attempts} attempts (seed {spec.seed})",
        seed=spec.seed,
        attempts=attempts,
    )


def _bean(n: int) -> ClosedCurve:
    """Radial curve with one dent at the top; star-shaped about the origin"""

    def fn(t):
        d = np.angle(np.exp(1j * (t - np.pi / 2)))
        r = 1.0 - 0.3 * np.exp(-(d**2) / (2 * 0.35**2))
        return r * np.cos(t), r * np.sin(t)

    return sample_equal_arc(fn, n)


def _kidney(n: int, span: float = 2.0, half_width: float = 0.5, bend: float = 1.0) -> ClosedCurve:
    """
    Rounded band bent along a circular arc

    A superellipse (exponent 4) of half-length span and half-width
    half_width in (u, v) is wrapped around the circle of radius bend:
    (u, v) -> (bend + v) (sin u, cos u). The arc covers more than a half
    turn, so no interior point sees the whole boundary.
    """

    def fn(t):
        c, s = np.cos(t), np.sin(t)
        rho = (np.abs(c) ** 4 / span**4 + np.abs(s) ** 4 / half_width**4) ** -0.25
        u, v = rho * c, rho * s
        return (bend + v) * np.sin(u), (bend + v) * np.cos(u)

    return sample_equal_arc(fn, n)


def _preset(spec: CurveSpec) -> ClosedCurve:
    name = str(spec.params.get("name", "")).lower()
    if name == "bean":
        return _bean(spec.n_points)
    if name == "kidney":
        return _kidney(spec.n_points)
    raise CurveSpecError(f"Unknown preset '{name}' (expected one of: {', '.join(PRESETS)})")


def generate(spec: CurveSpec) -> ClosedCurve:
    """
    Generate the curve a spec describes

    Returns:
        Uniformly spaced, counterclockwise, embedded curve

    Raises:
        CurveSpecError: If the parameters violate the kind's constraints
        GenerationError: If rejection sampling exhausts its attempt budget
    """
    rng = make_rng(spec.seed)

    if spec.kind == CurveKind.CIRCLE:
        curve = _circle(spec)
    elif spec.kind == CurveKind.ELLIPSE:
        curve = _ellipse(spec)
    elif spec.kind == CurveKind.RADIAL_FOURIER:
        curve = _radial_fourier(spec, rng)
    elif spec.kind == CurveKind.PLANAR_FOURIER:
        curve = _planar_fourier(spec, rng)
    else:
        curve = _preset(spec)

    curve = _positively_oriented(curve)
    if not is_embedded(curve):
        raise CurveSpecError(f"{spec.kind.value} parameters produce a self-intersecting curve")
    return curve


def _star_spec(seed: int, n_points: int, attempts: int = DEFAULT_ATTEMPTS) -> CurveSpec:
    """Radial spec whose curve is clearly non-convex and resolved, found by rejection"""
    rng = make_rng(seed)
    for _ in range(attempts):
        modes = int(rng.integers(2, 7))
        amplitude = float(rng.uniform(0.25, 0.6))
        m = np.arange(1, modes + 1)
        a = rng.normal(size=modes) / m
        b = rng.normal(size=modes) / m
        scale = amplitude / (np.sum(np.abs(a)) + np.sum(np.abs(b)))
        a, b = a * scale, b * scale

        geom = reference_geometry(_radial_fn(1.0, a, b))
        if geom is None or is_convex(geom, NONCONVEX_MARGIN * geom.max_abs_curvature):
            continue
        return CurveSpec(
            CurveKind.RADIAL_FOURIER,
            {"r0": 1.0, "a": a.tolist(), "b": b.tolist()},
            seed=seed,
            n_points=n_points,
        )
    raise GenerationError(
        f"No non-convex star-shaped curve in {attempts} attempts (seed {seed})",
        seed=seed,
        attempts=attempts,
    )


def slot_spec(category: str, seed: int, n_points: int = 512) -> CurveSpec:
    """
    Spec for one corpus slot

    Args:
        category: circle, convex, star or general
        seed: Slot seed (corpus seed + slot index)
        n_points: Points per curve
    """
    rng = make_rng(seed)
    if category == "circle":
        params = {
            "radius": float(rng.uniform(0.5, 2.0)),
            "center": rng.uniform(-1.0, 1.0, size=2).tolist(),
        }
        return CurveSpec(CurveKind.CIRCLE, params, seed, n_points)
    if category == "convex":
        a = float(rng.uniform(0.5, 2.0))
        params = {
            "a": a,
            "b": a * float(rng.uniform(0.4, 0.85)),
            "rotation": float(rng.uniform(0.0, np.pi)),
            "center": rng.uniform(-1.0, 1.0, size=2).tolist(),
        }
        return CurveSpec(CurveKind.ELLIPSE, params, seed, n_points)
    if category == "star":
        return _star_spec(seed, n_points)
    if category == "general":
        return CurveSpec(
            CurveKind.PLANAR_FOURIER, {"modes": int(rng.integers(3, 7))}, seed, n_points
        )
    raise CurveSpecError(
        f"Unknown corpus category '{category}' (expected one of: {', '.join(SWEEP_CATEGORIES)})"
    )


def mix_counts(count: int, mix: Dict[str, float]) -> Dict[str, int]:
    """Split count across categories by weight (largest remainder)"""
    unknown = set(mix) - set(SWEEP_CATEGORIES)
    if unknown:
        raise CurveSpecError(f"Unknown corpus categories: {', '.join(sorted(unknown))}")
    weights = {k: float(v) for k, v in mix.items() if v > 0}
    total = sum(weights.values())
    if total <= 0:
        raise CurveSpecError("Corpus mix needs at least one positive weight")

    exact = {k: count * w / total for k, w in weights.items()}
    counts = {k: int(np.floor(v)) for k, v in exact.items()}
    remaining = count - sum(counts.values())
    order = sorted(weights, key=lambda k: (-(exact[k] - counts[k]), SWEEP_CATEGORIES.index(k)))
    for k in order[:remaining]:
        counts[k] += 1
    return counts


def sweep_specs(
    count: int, seed: int, mix: Optional[Dict[str, float]] = None, n_points: int = 512
) -> List[CurveSpec]:
    """Deterministic list of slot specs for a corpus"""
    if count < 1:
        raise CurveSpecError(f"Corpus count must be >= 1, got {count}")
    counts = mix_counts(count, mix or DEFAULT_MIX)
    categories = [k for k in SWEEP_CATEGORIES for _ in range(counts.get(k, 0))]
    order = make_rng(seed).permutation(len(categories))

    specs = []
    for slot, index in enumerate(order):
        try:
            specs.append(slot_spec(categories[index], seed + slot, n_points))
        except CurveError as e:
            raise GenerationError(f"Corpus slot {slot}: {e}", seed=seed + slot)
    return specs


def corpus_sweep(
    count: int,
    seed: int,
    mix: Optional[Dict[str, float]] = None,
    n_points: int = 512,
    progress: bool = False,
) -> List[ClosedCurve]:
    """
    Deterministic corpus of embedded curves

    Args:
        count: Number of curves (>= 1)
        seed: Corpus seed; slot i uses seed + i
        mix: Category weights over circle / convex / star / general
             (default 20% convex, 40% star-shaped non-convex, 40% general)
        n_points: Points per curve
        progress: Show a tqdm bar

    Raises:
        GenerationError: If any slot fails; the message names the slot
    """
    specs = sweep_specs(count, seed, mix, n_points)
    curves = []
    for slot, spec in enumerate(
        tqdm(specs, desc="Generating corpus", unit="curve", ncols=100, disable=not progress)
    ):
        try:
            curves.append(generate(spec))
        except CurveError as e:
            raise GenerationError(f"Corpus slot {slot}: {e}", seed=spec.seed)
    return curves
