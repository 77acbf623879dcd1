"""Evaluation of the harmonic map, its normal, metric and curvature."""

from hsurf.evaluation.evaluate import (
    Evaluator,
    Jet,
    default_basepoint,
    evaluate,
    evaluate_many,
    jet,
    normal,
    normal_from_phi,
)
from hsurf.evaluation.integrate import integrate_curvature
from hsurf.evaluation.metric import (
    MetricSample,
    curvature_density,
    metric_from_phi,
    metric_sample,
)

__all__ = [
    "Evaluator",
    "Jet",
    "MetricSample",
    "curvature_density",
    "default_basepoint",
    "evaluate",
    "evaluate_many",
    "integrate_curvature",
    "jet",
    "metric_from_phi",
    "metric_sample",
    "normal",
    "normal_from_phi",
]
