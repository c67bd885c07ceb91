"""Offline class-specific split-conformal thresholds."""

import numpy as np

from banditcp.errors import InvalidInputError


def split_thresholds(scores: np.ndarray, labels: np.ndarray, alpha: float) -> np.ndarray:
    """
    Class-specific split-conformal thresholds from labelled calibration data.

    For class k with ``n_k`` calibration rows the threshold is the
    ``(floor(n_k * alpha) + 1)``-th smallest true-class score; a class with
    no rows gets ``-inf`` and is always included.

    Args:
        scores: Calibration scores, shape (n, K)
        labels: True labels in 0..K-1, shape (n,)
        alpha: Non-coverage rate in (0, 1)

    Returns:
        Thresholds, shape (K,)
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha}")
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    labels = np.asarray(labels, dtype=int)
    if labels.shape != scores.shape[:1]:
        raise InvalidInputError("need one label per score row")
    n_classes = scores.shape[1]
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        raise InvalidInputError(f"labels must lie in 0..{n_classes - 1}")

    thresholds = np.full(n_classes, -np.inf)
    for k in range(n_classes):
        true_scores = np.sort(scores[labels == k, k])
        rank = int(np.floor(true_scores.size * alpha)) + 1
        if rank <= true_scores.size:
            thresholds[k] = true_scores[rank - 1]
    return thresholds
