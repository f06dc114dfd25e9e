"""
Convenience API functions for curve files and one-shot measurements
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from .core import (
    ClosedCurve,
    compute_geometry,
    is_embedded,
    max_curvature,
    resample_uniform,
    turning_integral,
)
from .enums import Orientation, ResampleMethod
from .exceptions import CurveValidationError

PathLike = Union[str, Path]


def curve_from_dict(data: Dict[str, Any]) -> ClosedCurve:
    """
    Build a curve from the JSON curve format ``{"points": [[x, y], ...]}``

    Raises:
        CurveValidationError: If the points key is missing or malformed
    """
    if not isinstance(data, dict) or "points" not in data:
        raise CurveValidationError('Curve JSON must be an object with a "points" key')
    try:
        points = np.asarray(data["points"], dtype=float)
    except (TypeError, ValueError) as e:
        raise CurveValidationError(f"Curve points are not numeric pairs: {e}")
    return ClosedCurve(points)


def curve_to_dict(curve: ClosedCurve) -> Dict[str, Any]:
    return {"points": curve.points.tolist()}


def load_curve(path: PathLike, verbose: bool = True) -> Tuple[ClosedCurve, bool]:
    """
    Load a curve file, fixing clockwise orientation

    Args:
        path: Path to a curve JSON file
        verbose: Print a warning when the curve is reversed

    Returns:
        (curve, reversed) where reversed is True if the file listed the
        points clockwise and they were re-ordered counterclockwise

    Raises:
        CurveValidationError: If the file is not valid curve JSON
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise CurveValidationError(f"{path} is not valid JSON: {e}")

    curve = curve_from_dict(data)
    if curve.orientation == Orientation.CLOCKWISE:
        if verbose:
            print(f"⚠ {path.name}: points are clockwise; reversed to counterclockwise")
        return curve.reversed(), True
    return curve, False


def save_curve(curve: ClosedCurve, path: PathLike, verbose: bool = False) -> Path:
    """Write a curve in the JSON curve format; returns the path written"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(curve_to_dict(curve), f)
        f.write("\n")
    if verbose:
        print(f"✓ Curve saved to: {path}")
    return path


def measure_curve(curve: ClosedCurve, n: Optional[int] = None) -> Dict[str, Any]:
    """
    Resample a curve and return its basic scalar measurements

    Args:
        curve: Input curve
        n: Resample to this many points (default: keep the point count)

    Returns:
        Dictionary with n_points, length, area, k_max, k_max_index,
        turning and embedded
    """
    uniform = resample_uniform(curve, n or len(curve), ResampleMethod.LINEAR)
    geom = compute_geometry(uniform)
    k_max, index = max_curvature(geom)
    return {
        "n_points": uniform.n_points,
        "length": geom.total_length,
        "area": geom.enclosed_area,
        "k_max": k_max,
        "k_max_index": index,
        "turning": turning_integral(geom),
        "embedded": is_embedded(uniform),
    }
