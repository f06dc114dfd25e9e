"""
Core classes and operations for discrete closed planar curves

A curve is an ordered, implicitly closed polyline. Positive orientation is
counterclockwise (interior on the left). Normals are the tangent rotated by
-90 degrees, which is the outer normal for positively oriented curves, and
the signed curvature follows the Frenet relation Gamma'' = -k n: k > 0 where
the curve bends toward its interior.
"""

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.interpolate import splev, splprep

from .enums import Orientation, ResampleMethod
from .exceptions import (
    CurveValidationError,
    DegenerateCurveError,
    NonUniformSpacingError,
)
from .utils import (
    cross2,
    edge_vectors,
    find_self_intersection,
    grid_inside_mask,
    points_inside,
    spacing_variation,
)

MIN_POINTS = 8
MIN_LENGTH = 1e-12
UNIFORM_SPACING_TOL = 0.01
SPLINE_OVERSAMPLE = 8
DEFAULT_STAR_LEVELS = (8, 16, 32, 64)

PointLike = Union[Sequence[float], np.ndarray]


@dataclass(frozen=True, eq=False)
class ClosedCurve:
    """
    Ordered closed polyline with orientation implied by point order

    Attributes:
        points: Read-only (N, 2) float array; vertex N-1 connects back to
                vertex 0 and the closing vertex is never stored twice.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)

        if pts.ndim != 2 or pts.shape[1] != 2:
            raise CurveValidationError(
                f"Expected an (N, 2) array of planar points, got shape {pts.shape}"
            )
        if len(pts) < MIN_POINTS:
            raise CurveValidationError(
                f"A closed curve needs at least {MIN_POINTS} points, got {len(pts)}"
            )
        if not np.all(np.isfinite(pts)):
            raise CurveValidationError("Curve contains non-finite coordinates")

        lengths = np.linalg.norm(edge_vectors(pts), axis=1)
        if np.min(lengths) <= 0.0:
            i = int(np.argmin(lengths))
            raise CurveValidationError(
                f"Zero-length edge between vertices {i} and {(i + 1) % len(pts)} "
                f"(repeated point {pts[i].tolist()})"
            )

        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(edge_vectors(self.points), axis=1)

    @property
    def length(self) -> float:
        """Polyline perimeter"""
        return float(np.sum(self.edge_lengths))

    @property
    def signed_area(self) -> float:
        """Shoelace area; positive for counterclockwise curves"""
        nxt = np.roll(self.points, -1, axis=0)
        return 0.5 * float(np.sum(cross2(self.points, nxt)))

    @property
    def orientation(self) -> Orientation:
        if self.signed_area < 0:
            return Orientation.CLOCKWISE
        return Orientation.COUNTERCLOCKWISE

    @property
    def centroid(self) -> np.ndarray:
        """Area centroid (vertex mean when the enclosed area vanishes)"""
        pts = self.points
        nxt = np.roll(pts, -1, axis=0)
        w = cross2(pts, nxt)
        area = 0.5 * np.sum(w)
        if abs(area) < 1e-300:
            return pts.mean(axis=0)
        return ((pts + nxt) * w[:, None]).sum(axis=0) / (6.0 * area)

    @property
    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.points.min(axis=0), self.points.max(axis=0)

    def reversed(self) -> "ClosedCurve":
        """Same point set traversed the other way, starting at the same vertex"""
        return ClosedCurve(np.roll(self.points[::-1], 1, axis=0))

    def translated(self, offset: PointLike) -> "ClosedCurve":
        return ClosedCurve(self.points + np.asarray(offset, dtype=float))

    def scaled(self, factor: float, about: Optional[PointLike] = None) -> "ClosedCurve":
        center = self.centroid if about is None else np.asarray(about, dtype=float)
        return ClosedCurve(center + factor * (self.points - center))


@dataclass(frozen=True, eq=False)
class CurveGeometry:
    """
    Per-vertex derived fields of a uniformly resampled closed curve

    Attributes:
        points: Vertex positions the fields were computed on
        arc_positions: Cumulative arc length s at each vertex (s_0 = 0)
        total_length: Polyline length
        tangents: Unit tangents (direction of the chord p_{i-1} -> p_{i+1})
        outer_normals: Tangents rotated by -90 degrees
        curvatures: Signed Menger curvature at each vertex
        enclosed_area: Signed shoelace area
        vertex_weights: Arc length attributed to each vertex (mean of the two
                        adjacent edges), the quadrature weight Delta s_i
    """

    points: np.ndarray
    arc_positions: np.ndarray
    total_length: float
    tangents: np.ndarray
    outer_normals: np.ndarray
    curvatures: np.ndarray
    enclosed_area: float
    vertex_weights: np.ndarray

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def spacing(self) -> float:
        """Mean edge length"""
        return self.total_length / len(self.points)

    @property
    def max_abs_curvature(self) -> float:
        return float(np.max(np.abs(self.curvatures)))

    @property
    def support_values(self) -> np.ndarray:
        """Gamma_i . n_i measured from the coordinate origin"""
        return np.einsum("ij,ij->i", self.points, self.outer_normals)


@dataclass(frozen=True)
class StarKernelResult:
    """Outcome of the star-center search"""

    found: bool
    center: Optional[np.ndarray]
    min_support: float


def resample_uniform(
    curve: ClosedCurve,
    n: int,
    method: Union[ResampleMethod, str] = ResampleMethod.LINEAR,
) -> ClosedCurve:
    """
    Redistribute a curve to n points at equal arc-length spacing

    Vertex 0 of the input is kept as vertex 0 of the output, so orientation
    and phase are preserved.

    Args:
        curve: Input curve
        n: Number of output points (>= 8)
        method: LINEAR places points on the input edges at exact arc
                positions of the polyline; SPLINE places them at equal arc
                length on a periodic cubic spline through the vertices

    Returns:
        Resampled curve

    Raises:
        CurveValidationError: If n is below the minimum point count
        DegenerateCurveError: If the curve length is below 1e-12
    """
    if isinstance(method, str):
        method = ResampleMethod(method.lower())

    if n < MIN_POINTS:
        raise CurveValidationError(f"Resampling needs n >= {MIN_POINTS}, got {n}")

    total = curve.length
    if total < MIN_LENGTH:
        raise DegenerateCurveError(
            f"Cannot resample a degenerate curve: total length {total:.3e} < {MIN_LENGTH:g}"
        )

    closed = np.vstack([curve.points, curve.points[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    knots = np.concatenate([[0.0], np.cumsum(seg)])

    if method == ResampleMethod.LINEAR:
        targets = np.arange(n) * (knots[-1] / n)
        new_points = np.column_stack(
            [np.interp(targets, knots, closed[:, k]) for k in range(2)]
        )
        return ClosedCurve(new_points)

    # Periodic spline through the vertices, parametrised by chord length
    tck, _ = splprep([closed[:, 0], closed[:, 1]], u=knots, s=0, k=3, per=1)
    dense_u = np.linspace(knots[0], knots[-1], SPLINE_OVERSAMPLE * len(curve) + 1)
    dense = np.column_stack(splev(dense_u, tck))
    dense_s = np.concatenate(
        [[0.0], np.cumsum(np.linalg.norm(np.diff(dense, axis=0), axis=1))]
    )
    targets = np.arange(n) * (dense_s[-1] / n)
    u_targets = np.interp(targets, dense_s, dense_u)
    return ClosedCurve(np.column_stack(splev(u_targets, tck)))


def compute_geometry(
    curve: ClosedCurve, spacing_tol: Optional[float] = UNIFORM_SPACING_TOL
) -> CurveGeometry:
    """
    Compute arc length, tangents, normals, signed curvature and area

    Curvature at vertex i is the signed Menger curvature of
    (p_{i-1}, p_i, p_{i+1}): 2 (a x b) / (|a| |b| |p_{i+1} - p_{i-1}|)
    with a, b the incoming and outgoing edges.

    Args:
        curve: Uniformly resampled curve
        spacing_tol: Largest accepted (max - min) / mean edge length;
                     None disables the check

    Returns:
        CurveGeometry

    Raises:
        NonUniformSpacingError: If the spacing variation exceeds spacing_tol
        CurveValidationError: If a vertex folds back onto its predecessor
    """
    pts = curve.points
    prev = np.roll(pts, 1, axis=0)
    nxt = np.roll(pts, -1, axis=0)

    incoming = pts - prev
    outgoing = nxt - pts
    len_in = np.linalg.norm(incoming, axis=1)
    len_out = np.linalg.norm(outgoing, axis=1)

    if spacing_tol is not None:
        variation = spacing_variation(len_out)
        if variation > spacing_tol:
            raise NonUniformSpacingError(
                f"Edge spacing varies by {variation:.2%} (limit {spacing_tol:.2%}); "
                "resample the curve first"
            )

    chord = nxt - prev
    len_chord = np.linalg.norm(chord, axis=1)
    if np.min(len_chord) <= 0.0:
        i = int(np.argmin(len_chord))
        raise CurveValidationError(f"Curve folds back on itself at vertex {i}")

    curvatures = 2.0 * cross2(incoming, outgoing) / (len_in * len_out * len_chord)
    tangents = chord / len_chord[:, None]
    normals = np.column_stack([tangents[:, 1], -tangents[:, 0]])

    arc_positions = np.concatenate([[0.0], np.cumsum(len_out)[:-1]])
    area = 0.5 * float(np.sum(cross2(pts, nxt)))

    return CurveGeometry(
        points=pts,
        arc_positions=arc_positions,
        total_length=float(np.sum(len_out)),
        tangents=tangents,
        outer_normals=normals,
        curvatures=curvatures,
        enclosed_area=area,
        vertex_weights=0.5 * (len_in + len_out),
    )


def max_curvature(geom: CurveGeometry) -> Tuple[float, int]:
    """Largest signed curvature and the lowest vertex index attaining it"""
    index = int(np.argmax(geom.curvatures))
    return float(geom.curvatures[index]), index


def turning_integral(geom: CurveGeometry) -> float:
    """Sum of k_i * Delta s_i; 2*pi for positively oriented Jordan curves"""
    return float(np.sum(geom.curvatures * geom.vertex_weights))


def second_arc_derivative(
    geom: CurveGeometry, values: Optional[np.ndarray] = None
) -> np.ndarray:
    """
    Periodic central second difference with respect to arc length

    Args:
        geom: Geometry supplying the vertex spacing
        values: Per-vertex field (defaults to the curvature)
    """
    f = geom.curvatures if values is None else np.asarray(values, dtype=float)
    return (np.roll(f, -1) - 2.0 * f + np.roll(f, 1)) / geom.vertex_weights**2


def divergence_integral(curve: ClosedCurve) -> float:
    """
    Edge-wise integral of Gamma . n ds, equal to 2A for any closed polygon

    On each edge Gamma . n is constant (the edge's distance from the
    origin), so the integral reduces to the cross product of its endpoints.
    """
    nxt = np.roll(curve.points, -1, axis=0)
    return float(np.sum(cross2(curve.points, nxt)))


def vertex_divergence_sum(geom: CurveGeometry) -> float:
    """
    Vertex quadrature of the integral of Gamma . n ds

    Each vertex carries its support value Gamma_i . n_i with weight
    |p_{i+1} - p_{i-1}| / 2. With normals along the rotated central chord
    the sum telescopes to 2A for any positively oriented polygon, so a
    residual measures how far the normal field strays from that.
    """
    chords = np.roll(geom.points, -1, axis=0) - np.roll(geom.points, 1, axis=0)
    weights = 0.5 * np.linalg.norm(chords, axis=1)
    return float(np.sum(geom.support_values * weights))


def is_embedded(curve: ClosedCurve) -> bool:
    """True iff no two non-adjacent edges intersect"""
    return find_self_intersection(curve.points) is None


def is_convex(geom: CurveGeometry, tol: float = 0.0) -> bool:
    """True iff every vertex curvature is >= -tol"""
    return bool(np.all(geom.curvatures >= -tol))


def support_margins(geom: CurveGeometry, centers: np.ndarray, block: int = 512) -> np.ndarray:
    """
    min_i (Gamma_i - c) . n_i for each candidate center c

    Args:
        geom: Curve geometry
        centers: Candidate points, shape (M, 2)

    Returns:
        Array of shape (M,)
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    base = geom.support_values
    out = np.empty(len(centers))
    for start in range(0, len(centers), block):
        c = centers[start : start + block]
        out[start : start + block] = (base[None, :] - c @ geom.outer_normals.T).min(axis=1)
    return out


def find_star_center(
    curve: ClosedCurve,
    geom: CurveGeometry,
    levels: Sequence[int] = DEFAULT_STAR_LEVELS,
    hints: Iterable[PointLike] = (),
) -> StarKernelResult:
    """
    Search for a point the curve is star-shaped with respect to

    Any hint points are tried first, then the centroid, then grids of
    increasing resolution over the bounding box (interior points only),
    finishing with a local grid around the best candidate. The first
    qualifying level returns its best candidate.

    A negative result is not a proof that the star kernel is empty.

    Args:
        curve: Curve to search
        geom: Its geometry
        levels: Grid resolutions per side, coarse to fine
        hints: Points to test before the centroid

    Returns:
        StarKernelResult; when nothing qualifies, min_support holds the
        best (negative) margin seen
    """
    best_center = None
    best_margin = -np.inf

    for point in [*hints, curve.centroid]:
        point = np.asarray(point, dtype=float)
        if not points_inside(curve.points, point[None, :])[0]:
            continue
        margin = float(support_margins(geom, point[None, :])[0])
        if margin >= 0.0:
            return StarKernelResult(True, point, margin)
        if margin > best_margin:
            best_center, best_margin = point, margin

    lo, hi = curve.bounding_box
    cell = None
    for res in levels:
        xs = np.linspace(lo[0], hi[0], res)
        ys = np.linspace(lo[1], hi[1], res)
        cell = (hi - lo) / (res - 1)
        mask = grid_inside_mask(curve.points, xs, ys)
        gx, gy = np.meshgrid(xs, ys)
        candidates = np.column_stack([gx[mask], gy[mask]])
        if len(candidates) == 0:
            continue

        margins = support_margins(geom, candidates)
        j = int(np.argmax(margins))
        if margins[j] > best_margin:
            best_center, best_margin = candidates[j], float(margins[j])
        if margins[j] >= 0.0:
            return StarKernelResult(True, candidates[j], float(margins[j]))

    # Local refinement: two finest cells either side of the best candidate
    if best_center is not None and cell is not None:
        xs = np.linspace(best_center[0] - 2 * cell[0], best_center[0] + 2 * cell[0], 17)
        ys = np.linspace(best_center[1] - 2 * cell[1], best_center[1] + 2 * cell[1], 17)
        gx, gy = np.meshgrid(xs, ys)
        candidates = np.column_stack([gx.ravel(), gy.ravel()])
        candidates = candidates[points_inside(curve.points, candidates)]
        if len(candidates):
            margins = support_margins(geom, candidates)
            j = int(np.argmax(margins))
            if margins[j] > best_margin:
                best_center, best_margin = candidates[j], float(margins[j])
            if margins[j] >= 0.0:
                return StarKernelResult(True, candidates[j], float(margins[j]))

    return StarKernelResult(False, None, float(best_margin))


def normalize_area(curve: ClosedCurve, target: float = np.pi) -> ClosedCurve:
    """
    Scale a curve about its centroid so it encloses the target area

    Raises:
        DegenerateCurveError: If the enclosed area is not positive
    """
    area = curve.signed_area
    if area <= 0.0:
        raise DegenerateCurveError(
            f"Cannot normalize a curve with non-positive area {area:.3e}"
        )
    return curve.scaled(float(np.sqrt(target / area)))


def curvature_variation(geom: CurveGeometry) -> float:
    """
    Coefficient of variation (std / mean) of the curvature field

    Zero exactly for constant curvature; the mean is the turning integral
    divided by length, so it is positive for counterclockwise Jordan curves.
    Returns nan when the mean curvature is not positive.
    """
    mean = float(np.mean(geom.curvatures))
    if mean <= 0.0:
        return float("nan")
    return float(np.std(geom.curvatures) / mean)
