"""
Core math for bandit conformal prediction.

This module provides probability-simplex utilities, the softmax/APS/RAPS
conformity scores and the check loss used for quantile tracking.
"""

from banditcp.core.check_loss import check_loss, check_subgradient, weighted_check_loss
from banditcp.core.models import ProbVector, ScoreKind, ScoreSpec, ScoreVector
from banditcp.core.scores import decreasing_order, score_all, score_batch
from banditcp.core.simplex import softmax_transform, uniform_probs, validate_probs

__all__ = [
    "ProbVector",
    "ScoreVector",
    "ScoreKind",
    "ScoreSpec",
    "softmax_transform",
    "validate_probs",
    "uniform_probs",
    "score_all",
    "score_batch",
    "decreasing_order",
    "check_loss",
    "check_subgradient",
    "weighted_check_loss",
]
