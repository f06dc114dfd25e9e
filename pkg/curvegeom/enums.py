"""
Enumerations for the curvegeom library
"""

from enum import Enum


class ResampleMethod(Enum):
    """Interpolant used when redistributing vertices along a curve"""

    LINEAR = "linear"  # Points on the input polyline's edges
    SPLINE = "spline"  # Points on a periodic cubic spline through the vertices


class Orientation(Enum):
    """Traversal direction of a closed curve"""

    COUNTERCLOCKWISE = "ccw"
    CLOCKWISE = "cw"
