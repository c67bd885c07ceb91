"""Accumulative coverage, set-size and arm-pull metrics."""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from banditcp.conformal.prediction import PredictionSet
from banditcp.errors import InvalidInputError


@dataclass
class CoverageAccumulator:
    """
    Running totals over every instance seen so far.

    Per-class counters are indexed by the true class. The ``window_*``
    counters restart whenever :meth:`take_window_size` is called.
    """

    n_classes: int
    covered: np.ndarray = field(default=None)
    total: np.ndarray = field(default=None)
    arm_correct: np.ndarray = field(default=None)
    arm_total: np.ndarray = field(default=None)
    set_size_sum: float = 0.0
    instance_count: int = 0
    ce_loss_sum: float = 0.0
    window_size_sum: float = 0.0
    window_count: int = 0

    def __post_init__(self):
        if self.n_classes < 2:
            raise InvalidInputError(f"need at least 2 classes, got {self.n_classes}")
        for name in ("covered", "total", "arm_correct", "arm_total"):
            if getattr(self, name) is None:
                setattr(self, name, np.zeros(self.n_classes, dtype=np.int64))

    def take_window_size(self) -> Optional[float]:
        """Mean set size since the previous call, then reset the window."""
        if self.window_count == 0:
            return None
        mean = self.window_size_sum / self.window_count
        self.window_size_sum = 0.0
        self.window_count = 0
        return mean


def record_step(
    acc: CoverageAccumulator,
    prediction_set: PredictionSet,
    y: int,
    arm: int,
    ce_loss: float,
    set_size: Optional[int] = None,
) -> CoverageAccumulator:
    """
    Add one instance to the totals.

    Args:
        acc: Accumulator, updated in place
        prediction_set: Set issued for the instance
        y: True class
        arm: Pulled arm
        ce_loss: Bandit cross-entropy of the instance
        set_size: Size override, defaults to the set's own size

    Returns:
        The same accumulator
    """
    if not 0 <= y < acc.n_classes:
        raise InvalidInputError(f"label {y} outside 0..{acc.n_classes - 1}")
    size = prediction_set.size if set_size is None else set_size
    acc.total[y] += 1
    acc.covered[y] += int(y in prediction_set)
    acc.arm_total[y] += 1
    acc.arm_correct[y] += int(arm == y)
    acc.set_size_sum += size
    acc.window_size_sum += size
    acc.window_count += 1
    acc.instance_count += 1
    acc.ce_loss_sum += ce_loss
    return acc


def record_batch(
    acc: CoverageAccumulator,
    membership: np.ndarray,
    labels: np.ndarray,
    arms: np.ndarray,
    ce_losses: np.ndarray,
) -> CoverageAccumulator:
    """
    Batched :func:`record_step` over a membership matrix (n, K).

    Gives the same totals as recording the rows one by one.
    """
    labels = np.asarray(labels, dtype=int)
    n = labels.shape[0]
    if membership.shape != (n, acc.n_classes):
        raise InvalidInputError(f"membership shape {membership.shape} for {n} labels")
    if n and (labels.min() < 0 or labels.max() >= acc.n_classes):
        raise InvalidInputError(f"labels must lie in 0..{acc.n_classes - 1}")

    covered = membership[np.arange(n), labels].astype(float)
    sizes = membership.sum(axis=1)
    acc.total += np.bincount(labels, minlength=acc.n_classes)
    acc.covered += np.bincount(labels, weights=covered, minlength=acc.n_classes).astype(np.int64)
    acc.arm_total += np.bincount(labels, minlength=acc.n_classes)
    acc.arm_correct += np.bincount(
        labels, weights=(np.asarray(arms) == labels).astype(float), minlength=acc.n_classes
    ).astype(np.int64)
    size_total = int(sizes.sum())
    acc.set_size_sum += size_total
    acc.window_size_sum += size_total
    acc.window_count += n
    acc.instance_count += n
    acc.ce_loss_sum += float(np.sum(ce_losses))
    return acc


def class_coverage(acc: CoverageAccumulator) -> np.ndarray:
    """Accumulative coverage per class; NaN for classes never observed."""
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(acc.total > 0, acc.covered / np.maximum(acc.total, 1), np.nan)


def acum_cvg_extrema(acc: CoverageAccumulator) -> Tuple[Optional[float], Optional[float]]:
    """
    Smallest and largest accumulative class coverage over observed classes.

    Returns:
        ``(min, max)``, or ``(None, None)`` before any class is observed
    """
    coverage = class_coverage(acc)
    observed = coverage[~np.isnan(coverage)]
    if observed.size == 0:
        return None, None
    return float(observed.min()), float(observed.max())


def acum_size(acc: CoverageAccumulator) -> Optional[float]:
    """Mean prediction-set size over all instances so far."""
    if acc.instance_count == 0:
        return None
    return acc.set_size_sum / acc.instance_count


def arm_accuracy(acc: CoverageAccumulator) -> np.ndarray:
    """Per-class proportion of pulls that hit the true label; NaN if unobserved."""
    return np.where(
        acc.arm_total > 0, acc.arm_correct / np.maximum(acc.arm_total, 1), np.nan
    )
