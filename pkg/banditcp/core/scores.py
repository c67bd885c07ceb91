"""Conformity scores: softmax, APS and RAPS."""

import numpy as np

from banditcp.core.models import ProbVector, ScoreKind, ScoreSpec, ScoreVector
from banditcp.core.simplex import validate_probs
from banditcp.errors import InvalidInputError


def score_all(probs: ProbVector, u: float, spec: ScoreSpec) -> ScoreVector:
    """
    Compute the conformity score of every class for one instance.

    APS and RAPS rank classes by decreasing probability (ties go to the lower
    class index). For the class at rank r (1-based) the APS score is
    ``1 - sum_{l<r} p_(l) - u * p_(r)``; RAPS subtracts
    ``lam * max(0, r - k_reg)`` on top of that. Larger scores mean the class
    is more plausible.

    Args:
        probs: Class probabilities, shape (K,)
        u: Uniform draw in [0, 1], shared by all classes of the instance
        spec: Score family and RAPS parameters

    Returns:
        Scores, shape (K,)

    Raises:
        InvalidInputError: If ``u`` is outside [0, 1] or ``probs`` is invalid
    """
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1:
        raise InvalidInputError(f"score_all expects a single ProbVector, got shape {probs.shape}")
    return score_batch(probs[None, :], np.array([u], dtype=float), spec)[0]


def score_batch(probs: np.ndarray, u: np.ndarray, spec: ScoreSpec) -> np.ndarray:
    """
    Batched :func:`score_all`.

    Args:
        probs: Class probabilities, shape (n, K)
        u: One uniform draw per row, shape (n,)
        spec: Score family and RAPS parameters

    Returns:
        Scores, shape (n, K)
    """
    probs = validate_probs(probs)
    u = np.asarray(u, dtype=float)
    if u.shape != probs.shape[:1]:
        raise InvalidInputError(f"need one u per row, got {u.shape} for {probs.shape}")
    if np.any(u < 0.0) or np.any(u > 1.0) or not np.all(np.isfinite(u)):
        raise InvalidInputError("u must lie in [0, 1]")

    if spec.kind == ScoreKind.SOFTMAX:
        return probs.copy()

    n, n_classes = probs.shape
    # Stable sort on -p keeps ascending class index among ties
    order = np.argsort(-probs, axis=1, kind="stable")
    sorted_probs = np.take_along_axis(probs, order, axis=1)
    mass_before = np.zeros_like(sorted_probs)
    mass_before[:, 1:] = np.cumsum(sorted_probs, axis=1)[:, :-1]

    sorted_scores = 1.0 - mass_before - u[:, None] * sorted_probs
    np.clip(sorted_scores, 0.0, 1.0, out=sorted_scores)

    if spec.kind == ScoreKind.RAPS:
        ranks = np.arange(1, n_classes + 1)
        sorted_scores = sorted_scores - spec.lam * np.maximum(0, ranks - spec.k_reg)

    scores = np.empty_like(sorted_scores)
    np.put_along_axis(scores, order, sorted_scores, axis=1)
    return scores


def decreasing_order(probs: ProbVector) -> np.ndarray:
    """Class indices sorted by decreasing probability, ties by ascending index."""
    return np.argsort(-np.asarray(probs, dtype=float), axis=-1, kind="stable")
