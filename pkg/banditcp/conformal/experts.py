"""
Exponentially weighted aggregation of quantile trackers.

Each expert runs the per-class quantile update with its own learning rate.
Expert ``j`` is weighted for class ``k`` by ``exp(-L_jk / sqrt(t + 1))``
where ``L_jk`` is its accumulated bandit-weighted check loss.
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from banditcp.core.check_loss import check_loss
from banditcp.errors import InvalidInputError

logger = logging.getLogger(__name__)


@dataclass
class ExpertBank:
    """Thresholds and accumulated losses for J experts over K classes."""

    taus: np.ndarray
    losses: np.ndarray
    rates: np.ndarray
    alpha: float
    step: int = 0

    def __post_init__(self):
        self.taus = np.asarray(self.taus, dtype=float).copy()
        self.losses = np.asarray(self.losses, dtype=float).copy()
        self.rates = np.asarray(self.rates, dtype=float).copy()
        if self.taus.ndim != 2 or self.taus.shape[0] < 2:
            raise InvalidInputError(f"need at least 2 experts, got taus of shape {self.taus.shape}")
        if self.losses.shape != self.taus.shape or self.rates.shape != self.taus.shape[:1]:
            raise InvalidInputError("taus, losses and rates disagree in shape")
        if np.any(self.rates <= 0):
            raise InvalidInputError("expert learning rates must be > 0")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInputError(f"alpha must lie in (0, 1), got {self.alpha}")

    @classmethod
    def initial(cls, n_classes: int, alpha: float, rates: Sequence[float]) -> "ExpertBank":
        n_experts = len(rates)
        return cls(
            taus=np.zeros((n_experts, n_classes)),
            losses=np.zeros((n_experts, n_classes)),
            rates=np.asarray(rates, dtype=float),
            alpha=alpha,
        )

    @property
    def n_experts(self) -> int:
        return self.taus.shape[0]

    @property
    def n_classes(self) -> int:
        return self.taus.shape[1]


def _weights_from_losses(losses: np.ndarray, step: int) -> np.ndarray:
    # Subtracting the minimum cancels in the normalisation
    scaled = -(losses - losses.min(axis=0, keepdims=True)) / np.sqrt(step + 1)
    weights = np.exp(scaled)
    return weights / weights.sum(axis=0, keepdims=True)


def expert_weights(bank: ExpertBank, k: int) -> np.ndarray:
    """Normalised expert weights for class ``k``, shape (J,)."""
    return _weights_from_losses(bank.losses[:, k : k + 1], bank.step)[:, 0]


def aggregate_quantile(bank: ExpertBank, k: int) -> float:
    """Weighted mean of the experts' class-``k`` thresholds."""
    tau_bar = float(np.dot(expert_weights(bank, k), bank.taus[:, k]))
    # Keep rounding from stepping outside the experts' range
    return float(np.clip(tau_bar, bank.taus[:, k].min(), bank.taus[:, k].max()))


def aggregate_all(bank: ExpertBank) -> np.ndarray:
    """:func:`aggregate_quantile` for every class, shape (K,)."""
    weights = _weights_from_losses(bank.losses, bank.step)
    tau_bar = (weights * bank.taus).sum(axis=0)
    return np.clip(tau_bar, bank.taus.min(axis=0), bank.taus.max(axis=0))


def leading_expert(bank: ExpertBank, k: int) -> int:
    """Index of the highest-weight expert for class ``k`` (lowest index on ties)."""
    return int(np.argmin(bank.losses[:, k]))


def expert_step(
    bank: ExpertBank, k: int, s_k: float, delta_k: float, alpha: float = None
) -> ExpertBank:
    """
    Charge every expert its check loss for class ``k`` and update its threshold.

    The loss is taken at the expert's threshold before the update. The step
    counter advances once per call, also when ``delta_k`` is zero.

    Args:
        bank: Expert bank, updated in place
        k: Class whose estimate is nonzero
        s_k: Class-``k`` score from the pre-update model
        delta_k: Indicator estimate for class ``k``
        alpha: Non-coverage rate; defaults to the bank's own

    Returns:
        The same bank
    """
    alpha = bank.alpha if alpha is None else alpha
    if delta_k != 0:
        taus_k = bank.taus[:, k]
        bank.losses[:, k] += delta_k * check_loss(s_k, taus_k, alpha)
        bank.taus[:, k] = taus_k + bank.rates * delta_k * (alpha - (s_k < taus_k))
    bank.step += 1
    return bank
