"""Scalability prediction and measurement for iterative master-worker algorithms."""

from ._core import (
    CurvePoint,
    LinearSystem,
    MachineConstants,
    PredictionCurve,
    diag_dominance_check,
    make_benchmark_system,
    make_random_dominant_system,
    optimal_workers,
    predict_curve,
    residual_norm,
    scalability_bound,
    solve,
    step_reference,
    tornado_preset,
)

__all__ = [
    "CurvePoint",
    "LinearSystem",
    "MachineConstants",
    "PredictionCurve",
    "diag_dominance_check",
    "make_benchmark_system",
    "make_random_dominant_system",
    "optimal_workers",
    "predict_curve",
    "residual_norm",
    "scalability_bound",
    "solve",
    "step_reference",
    "tornado_preset",
]

__version__ = "1.0.0"
