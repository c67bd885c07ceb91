"""Prediction-set construction from per-class scores and thresholds."""

from dataclasses import dataclass
from typing import FrozenSet

import numpy as np

from banditcp.core.models import ScoreVector
from banditcp.errors import InvalidInputError


@dataclass(frozen=True)
class PredictionSet:
    """Classes whose score reaches their threshold, plus the inputs used."""

    members: FrozenSet[int]
    scores: ScoreVector
    thresholds: np.ndarray

    @property
    def size(self) -> int:
        return len(self.members)

    def __contains__(self, k: int) -> bool:
        return k in self.members


def predict_set(scores: ScoreVector, thresholds: np.ndarray) -> PredictionSet:
    """
    Build the prediction set ``{k : scores[k] >= thresholds[k]}``.

    The comparison is inclusive, so the set may be empty or contain every class.

    Raises:
        InvalidInputError: If the two vectors differ in length
    """
    scores = np.asarray(scores, dtype=float)
    thresholds = np.asarray(thresholds, dtype=float)
    if scores.shape != thresholds.shape or scores.ndim != 1:
        raise InvalidInputError(
            f"scores {scores.shape} and thresholds {thresholds.shape} must be equal-length vectors"
        )
    members = frozenset(int(k) for k in np.flatnonzero(scores >= thresholds))
    return PredictionSet(members=members, scores=scores, thresholds=thresholds)


def predict_sets(scores: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """
    Batched :func:`predict_set` as a boolean membership matrix.

    Args:
        scores: Scores, shape (n, K)
        thresholds: One threshold per class, shape (K,)

    Returns:
        ``membership[i, k]`` is True when class k is in the set of row i
    """
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    thresholds = np.asarray(thresholds, dtype=float)
    if thresholds.shape != scores.shape[1:]:
        raise InvalidInputError(
            f"need one threshold per class, got {thresholds.shape} for scores {scores.shape}"
        )
    return scores >= thresholds[None, :]
