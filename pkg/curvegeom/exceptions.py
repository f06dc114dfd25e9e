"""
Custom exceptions for the curvegeom library
"""


class CurveError(Exception):
    """Base exception for curve-related errors"""

    pass


class CurveValidationError(CurveError):
    """Raised when curve input fails construction checks"""

    pass


class DegenerateCurveError(CurveValidationError):
    """Raised when a curve has (near) zero length or non-positive area"""

    pass


class NonUniformSpacingError(CurveValidationError):
    """Raised when geometry is requested on a curve that was not resampled"""

    pass


class NotEmbeddedError(CurveError):
    """Raised when a curve intersects itself"""

    pass


class CorrespondenceError(CurveError):
    """Raised when two flow states do not share vertex correspondence"""

    pass


class GridResolutionError(CurveError):
    """Raised when a sampling grid is too coarse to see the curve interior"""

    pass


class FlowError(CurveError):
    """Base exception for curve shortening flow failures.

    When raised from a flow run, the partially recorded trajectory is kept
    on ``trajectory``.
    """

    def __init__(self, message: str, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class FlowEmbeddednessError(FlowError):
    """Raised when the evolving curve stops being embedded"""

    pass


class CurveSpecError(CurveError):
    """Raised when a generator spec violates its constraints"""

    pass


class GenerationError(CurveError):
    """Raised when rejection sampling runs out of attempts"""

    def __init__(self, message: str, seed=None, attempts: int = 0):
        super().__init__(message)
        self.seed = seed
        self.attempts = attempts
