"""
Curve Shortening Flow Checker

Simulates the curve shortening flow on discrete Jordan curves and verifies
k_max >= sqrt(pi / A) together with the identities and monotone quantities
that accompany it, on single curves, flow trajectories and seeded corpora.
"""

__version__ = "1.0.0"

from .flow import (
    BarrierReport,
    FlowConfig,
    FlowSample,
    FlowState,
    FlowTrajectory,
    barrier_monitor,
    pde_residual,
    rescaled_curve,
    run,
    stable_dt,
    step,
)
from .checker import (
    CheckResult,
    CurveChecker,
    StarBoundResult,
    Tolerances,
    VerificationReport,
    check_isoperimetric,
    check_main_inequality,
    check_star_bound,
    check_star_identity,
    detect_equality_case,
    inscribed_disk_radius,
    verify_curve,
    verify_trajectory,
)
from .corpus import CurveKind, CurveSpec, corpus_sweep, generate
from .batch import CorpusVerifier
from .reporter import ReportGenerator
from .manifest import RunManifest

__all__ = [
    # Flow engine
    "BarrierReport",
    "FlowConfig",
    "FlowSample",
    "FlowState",
    "FlowTrajectory",
    "barrier_monitor",
    "pde_residual",
    "rescaled_curve",
    "run",
    "stable_dt",
    "step",
    # Verifier
    "CheckResult",
    "CurveChecker",
    "StarBoundResult",
    "Tolerances",
    "VerificationReport",
    "check_isoperimetric",
    "check_main_inequality",
    "check_star_bound",
    "check_star_identity",
    "detect_equality_case",
    "inscribed_disk_radius",
    "verify_curve",
    "verify_trajectory",
    # Corpus
    "CurveKind",
    "CurveSpec",
    "corpus_sweep",
    "generate",
    # Batch and reports
    "CorpusVerifier",
    "ReportGenerator",
    "RunManifest",
]
