"""Arm sampling and the inverse-propensity indicator estimate."""

from dataclasses import dataclass

import numpy as np

from banditcp.core.models import ProbVector
from banditcp.errors import InvalidInputError


@dataclass(frozen=True)
class DeltaEstimate:
    """
    Importance-weighted estimate of the one-hot label indicator.

    ``Delta_k = weight * 1{k == arm}``; every class other than the pulled arm
    is implicitly zero.
    """

    arm: int
    weight: float
    n_classes: int

    def __post_init__(self):
        if not 0 <= self.arm < self.n_classes:
            raise InvalidInputError(f"arm {self.arm} outside 0..{self.n_classes - 1}")
        if not np.isfinite(self.weight) or self.weight < 0:
            raise InvalidInputError(f"weight must be finite and >= 0, got {self.weight}")

    def value(self, k: int) -> float:
        """Delta at class ``k``."""
        return self.weight if k == self.arm else 0.0

    def as_array(self) -> np.ndarray:
        dense = np.zeros(self.n_classes)
        dense[self.arm] = self.weight
        return dense


def sample_arms(pi: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    Draw one arm per row of ``pi`` by inverse-CDF sampling.

    Consumes exactly one uniform draw per row, so ``n`` calls to
    :func:`sample_arm` and one call here on the stacked rows agree.

    Args:
        pi: Policy probabilities, shape (n, K)
        rng: Generator owned by the run

    Returns:
        Arm indices, shape (n,)
    """
    pi = np.atleast_2d(np.asarray(pi, dtype=float))
    draws = rng.random(pi.shape[0])
    cdf = np.cumsum(pi, axis=1)
    arms = (cdf <= draws[:, None]).sum(axis=1)
    # Rounding can leave the last cdf entry just below the draw; fall back to
    # the last arm with positive probability
    last_positive = pi.shape[1] - 1 - np.argmax(pi[:, ::-1] > 0.0, axis=1)
    return np.minimum(arms, last_positive)


def sample_arm(pi: ProbVector, rng: np.random.Generator) -> int:
    """Draw a single arm ``k`` with probability ``pi[k]``."""
    return int(sample_arms(np.asarray(pi, dtype=float)[None, :], rng)[0])


def delta_from_feedback(arm: int, correct: bool, pi: ProbVector) -> DeltaEstimate:
    """
    Build the estimate from one arm pull and its binary feedback.

    Args:
        arm: Pulled arm
        correct: Whether the arm was the true label
        pi: Policy probabilities the arm was drawn from

    Returns:
        Estimate with weight ``1{correct} / pi[arm]``

    Raises:
        InvalidInputError: If ``pi[arm]`` is zero
    """
    pi = np.asarray(pi, dtype=float)
    if pi[arm] <= 0.0:
        raise InvalidInputError(f"cannot importance-weight arm {arm} with probability 0")
    weight = 1.0 / pi[arm] if correct else 0.0
    return DeltaEstimate(arm=int(arm), weight=float(weight), n_classes=pi.shape[0])


def feedback_weights(pi: np.ndarray, arms: np.ndarray, correct: np.ndarray) -> np.ndarray:
    """
    Batched :func:`delta_from_feedback`, returning only the weights.

    Raises:
        InvalidInputError: If a pulled arm has probability zero
    """
    pulled = pi[np.arange(len(arms)), arms]
    if np.any(pulled <= 0.0):
        raise InvalidInputError("cannot importance-weight an arm with probability 0")
    return np.where(correct, 1.0 / pulled, 0.0)
