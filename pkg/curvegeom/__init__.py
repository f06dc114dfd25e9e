"""
curvegeom - Discrete differential geometry of closed planar polylines

This library provides:
- Uniform arc-length resampling (linear or periodic spline)
- Signed Menger curvature, tangents, outer normals, arc length and area
- Embeddedness and convexity tests
- Star-center search
- Area normalization and JSON curve files

Basic Usage:
    >>> import numpy as np
    >>> from curvegeom import ClosedCurve, compute_geometry, max_curvature
    >>>
    >>> theta = np.linspace(0, 2 * np.pi, 512, endpoint=False)
    >>> curve = ClosedCurve(np.column_stack([2 * np.cos(theta), np.sin(theta)]))
    >>> geom = compute_geometry(curve, spacing_tol=None)
    >>> k_max, index = max_curvature(geom)
"""

__version__ = "1.0.0"
__license__ = "MIT"

# Core classes
from .core import ClosedCurve, CurveGeometry, StarKernelResult

# Operations
from .core import (
    compute_geometry,
    curvature_variation,
    divergence_integral,
    find_star_center,
    is_convex,
    is_embedded,
    max_curvature,
    normalize_area,
    resample_uniform,
    second_arc_derivative,
    support_margins,
    turning_integral,
    vertex_divergence_sum,
)

# Enums
from .enums import Orientation, ResampleMethod

# Exceptions
from .exceptions import (
    CurveError,
    CurveValidationError,
    DegenerateCurveError,
    NonUniformSpacingError,
    NotEmbeddedError,
    CorrespondenceError,
    GridResolutionError,
    FlowError,
    FlowEmbeddednessError,
    CurveSpecError,
    GenerationError,
)

# Convenience API functions
from .api import curve_from_dict, curve_to_dict, load_curve, save_curve, measure_curve

# Define public API
__all__ = [
    # Version info
    "__version__",
    "__license__",
    # Core classes
    "ClosedCurve",
    "CurveGeometry",
    "StarKernelResult",
    # Operations
    "compute_geometry",
    "curvature_variation",
    "divergence_integral",
    "find_star_center",
    "is_convex",
    "is_embedded",
    "max_curvature",
    "normalize_area",
    "resample_uniform",
    "second_arc_derivative",
    "support_margins",
    "turning_integral",
    "vertex_divergence_sum",
    # Enums
    "Orientation",
    "ResampleMethod",
    # Exceptions
    "CurveError",
    "CurveValidationError",
    "DegenerateCurveError",
    "NonUniformSpacingError",
    "NotEmbeddedError",
    "CorrespondenceError",
    "GridResolutionError",
    "FlowError",
    "FlowEmbeddednessError",
    "CurveSpecError",
    "GenerationError",
    # Convenience API
    "curve_from_dict",
    "curve_to_dict",
    "load_curve",
    "save_curve",
    "measure_curve",
]
