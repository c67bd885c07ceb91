"""
Conformal thresholds and prediction sets.

Includes the per-class online quantile tracker, its expert-weighted
aggregation over several learning rates, and the offline split rule.
"""

from banditcp.conformal.experts import (ExpertBank, aggregate_all, aggregate_quantile,
                                        expert_step, expert_weights, leading_expert)
from banditcp.conformal.prediction import PredictionSet, predict_set, predict_sets
from banditcp.conformal.quantile import QuantileBank, quantile_step
from banditcp.conformal.split import split_thresholds

__all__ = [
    "PredictionSet",
    "predict_set",
    "predict_sets",
    "QuantileBank",
    "quantile_step",
    "ExpertBank",
    "expert_weights",
    "aggregate_quantile",
    "aggregate_all",
    "leading_expert",
    "expert_step",
    "split_thresholds",
]
