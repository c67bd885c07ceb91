"""Probability simplex utilities."""

import numpy as np

from banditcp.core.models import ProbVector
from banditcp.errors import InvalidInputError

SIMPLEX_TOLERANCE = 1e-9


def softmax_transform(logits: np.ndarray) -> ProbVector:
    """
    Map logits to class probabilities.

    The maximum logit is subtracted before exponentiating, so the result is
    invariant under adding a constant to every logit. A 2-D input is treated
    as a batch of rows.

    Args:
        logits: Real scores, shape (K,) or (n, K) with K >= 2

    Returns:
        Probabilities with the same shape as ``logits``

    Raises:
        InvalidInputError: If a logit is not finite or K < 2
    """
    logits = np.asarray(logits, dtype=float)
    if logits.ndim not in (1, 2) or logits.shape[-1] < 2:
        raise InvalidInputError(f"logits must have K >= 2 entries, got shape {logits.shape}")
    if not np.all(np.isfinite(logits)):
        raise InvalidInputError("logits must be finite")

    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def validate_probs(probs: np.ndarray, name: str = "probs") -> ProbVector:
    """
    Check that ``probs`` lies on the simplex (row-wise for 2-D input).

    Args:
        probs: Candidate probabilities
        name: Argument name used in error messages

    Returns:
        ``probs`` as a float array

    Raises:
        InvalidInputError: If an entry is outside [0, 1] or a row does not sum to 1
    """
    probs = np.asarray(probs, dtype=float)
    if probs.ndim not in (1, 2) or probs.shape[-1] < 2:
        raise InvalidInputError(f"{name} must have K >= 2 entries, got shape {probs.shape}")
    if not np.all(np.isfinite(probs)):
        raise InvalidInputError(f"{name} must be finite")
    if np.any(probs < 0.0) or np.any(probs > 1.0):
        raise InvalidInputError(f"{name} entries must lie in [0, 1]")
    if np.any(np.abs(probs.sum(axis=-1) - 1.0) > SIMPLEX_TOLERANCE):
        raise InvalidInputError(f"{name} must sum to 1")
    return probs


def uniform_probs(n_classes: int) -> ProbVector:
    """Uniform distribution over ``n_classes`` classes."""
    if n_classes < 2:
        raise InvalidInputError(f"need at least 2 classes, got {n_classes}")
    return np.full(n_classes, 1.0 / n_classes)
