"""
Runtime diagnostics for the coverage and regret guarantees.

The accumulators here are filled online by the engine; the functions turn
them into the coverage gap, its high-probability bound, check-loss regret
against the best fixed threshold in hindsight and the expert-aggregation
regret.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from banditcp.conformal.experts import ExpertBank
from banditcp.conformal.quantile import QuantileBank
from banditcp.core.check_loss import check_loss
from banditcp.errors import InvalidInputError
from banditcp.policy.base_policy import PolicyKind, PolicySpec

logger = logging.getLogger(__name__)


@dataclass
class TheoremDiagnostics:
    """
    Per-class quantities accumulated during one run.

    Attributes:
        n_classes: K
        alpha: Non-coverage rate
        delta_conf: Confidence level delta of the coverage bound
        floor: Lower bound c_k on the policy probabilities, None when unknown
        b_closed: Closed-form b_k, None when unavailable
        class_counts: T_k
        miscovered: Number of class-k instances left out of their set
        signed_miscoverage_sum: Sum of ``1{Y=k} (alpha - 1{Y not in C})``
        tracker_loss: Sum of ``Delta_k * rho(s_k, tau_k)`` at the threshold
            used for prediction (the aggregate for expert banks)
        telescoping_sum: Sum of ``Delta_k * (alpha - 1{s_k < tau_k})``
        score_log: True-class scores per class, None when logging is off
        expert_losses: Final per-expert losses (J, K) of an expert bank
        steps: Instances processed
    """

    n_classes: int
    alpha: float
    delta_conf: float = 0.1
    floor: Optional[np.ndarray] = None
    b_closed: Optional[np.ndarray] = None
    log_scores: bool = True
    class_counts: np.ndarray = field(default=None)
    miscovered: np.ndarray = field(default=None)
    signed_miscoverage_sum: np.ndarray = field(default=None)
    tracker_loss: np.ndarray = field(default=None)
    telescoping_sum: np.ndarray = field(default=None)
    score_log: Optional[List[List[float]]] = None
    expert_losses: Optional[np.ndarray] = None
    steps: int = 0

    def __post_init__(self):
        if not 0.0 < self.delta_conf < 1.0:
            raise InvalidInputError(f"delta must lie in (0, 1), got {self.delta_conf}")
        k = self.n_classes
        if self.class_counts is None:
            self.class_counts = np.zeros(k, dtype=np.int64)
        if self.miscovered is None:
            self.miscovered = np.zeros(k, dtype=np.int64)
        if self.signed_miscoverage_sum is None:
            self.signed_miscoverage_sum = np.zeros(k)
        if self.tracker_loss is None:
            self.tracker_loss = np.zeros(k)
        if self.telescoping_sum is None:
            self.telescoping_sum = np.zeros(k)
        if self.log_scores and self.score_log is None:
            self.score_log = [[] for _ in range(k)]

    def record_coverage(
        self, labels: np.ndarray, covered: np.ndarray, true_scores: np.ndarray
    ) -> None:
        """Add a batch of coverage outcomes and true-class scores."""
        labels = np.asarray(labels, dtype=int)
        missed = (~np.asarray(covered, dtype=bool)).astype(float)
        counts = np.bincount(labels, minlength=self.n_classes)
        misses = np.bincount(labels, weights=missed, minlength=self.n_classes)
        self.class_counts += counts
        self.miscovered += misses.astype(np.int64)
        self.signed_miscoverage_sum += self.alpha * counts - misses
        self.steps += labels.shape[0]
        if self.score_log is not None:
            for y, s in zip(labels, true_scores):
                self.score_log[y].append(float(s))

    def record_update(self, k: int, s_k: float, delta_k: float, tau_k: float) -> None:
        """Add one threshold update for class ``k`` taken at ``tau_k``."""
        if delta_k == 0:
            return
        self.tracker_loss[k] += delta_k * check_loss(s_k, tau_k, self.alpha)
        self.telescoping_sum[k] += delta_k * (self.alpha - float(s_k < tau_k))


def policy_constants(
    spec: PolicySpec, n_classes: int, priors: Optional[np.ndarray] = None
) -> Tuple[Optional[np.ndarray], Optional[np.ndarray]]:
    """
    Floor ``c_k`` and closed-form ``b_k`` for a policy, where known.

    The uniform policy has ``c_k = 1/K`` and, with known class priors,
    ``b_k = K p_k``. The floored Bayes oracle has ``c_k = floor`` and
    ``b_k <= 1 / (1 - K floor)``, used as the value. Other policies only get
    ``c_k`` from a positive floor.

    Returns:
        Tuple of (c, b), each shape (K,) or None
    """
    c = spec.min_probability(n_classes)
    floor = np.full(n_classes, c) if c > 0 else None
    b = None
    if spec.kind == PolicyKind.UNIFORM and priors is not None:
        b = n_classes * np.asarray(priors, dtype=float)
    elif spec.kind == PolicyKind.BAYES_ORACLE and priors is not None and spec.floor > 0:
        b = np.full(n_classes, 1.0 / (1.0 - n_classes * spec.floor))
    return floor, b


def coverage_gap(diag: TheoremDiagnostics, k: int, T_k: Optional[int] = None) -> Optional[float]:
    """
    ``|alpha - miscovered_k / T_k|``; None when class ``k`` was never seen.
    """
    T_k = int(diag.class_counts[k]) if T_k is None else T_k
    if T_k <= 0:
        return None
    return abs(diag.alpha - diag.miscovered[k] / T_k)


def oracle_tau_star(true_class_scores: Sequence[float], alpha: float) -> float:
    """
    Lower endpoint of the empirical check-loss minimisers.

    This is the ``max(1, ceil(alpha * n))``-th smallest score.

    Raises:
        InvalidInputError: If no scores are given
    """
    scores = np.sort(np.asarray(true_class_scores, dtype=float))
    n = scores.size
    if n == 0:
        raise InvalidInputError("oracle_tau_star needs at least one score")
    # Guard against alpha * n landing a hair above an integer
    rank = max(1, math.ceil(alpha * n - 1e-9))
    return float(scores[min(rank, n) - 1])


def oracle_check_loss(true_class_scores: Sequence[float], alpha: float) -> float:
    """Total check loss of the scores at :func:`oracle_tau_star`."""
    scores = np.asarray(true_class_scores, dtype=float)
    if scores.size == 0:
        return 0.0
    return float(np.sum(check_loss(scores, oracle_tau_star(scores, alpha), alpha)))


def bandit_regret(diag: TheoremDiagnostics, k: int, T: Optional[int] = None) -> Optional[float]:
    """
    Average bandit-weighted check loss of the tracker minus that of the best
    fixed threshold in hindsight; None when the score log is off.
    """
    if diag.score_log is None:
        return None
    T = diag.steps if T is None else T
    if T <= 0:
        return None
    hindsight = oracle_check_loss(diag.score_log[k], diag.alpha)
    return (diag.tracker_loss[k] - hindsight) / T


def zeta(c_k: float, b_sum: float, delta: float) -> float:
    """``2/(3 c_k) log(2/delta) + sqrt(2 log(2/delta) b_sum)``."""
    log_term = math.log(2.0 / delta)
    return 2.0 / (3.0 * c_k) * log_term + math.sqrt(2.0 * log_term * b_sum)


def thm1_bound(
    diag: TheoremDiagnostics, k: int, T: int, eta2: float, tau_T: float
) -> Optional[float]:
    """
    High-probability bound on the class-``k`` coverage gap.

    ``|tau_T| / (eta2 T_k) + zeta_k(T, delta / K) / T_k`` with
    ``sum_t b_k = T b_k``. None without a floor, a closed-form ``b_k`` or
    any class-``k`` instance.
    """
    if diag.floor is None or diag.b_closed is None:
        return None
    T_k = int(diag.class_counts[k])
    if T_k <= 0 or diag.floor[k] <= 0:
        return None
    z = zeta(diag.floor[k], T * diag.b_closed[k], diag.delta_conf / diag.n_classes)
    return abs(tau_T) / (eta2 * T_k) + z / T_k


def expert_regret(diag: TheoremDiagnostics, k: int) -> Optional[float]:
    """
    Average loss of the aggregated threshold minus that of the best expert.
    """
    if diag.expert_losses is None or diag.steps <= 0:
        return None
    return (diag.tracker_loss[k] - diag.expert_losses[:, k].min()) / diag.steps


def expert_regret_bound(c_k: float, T: int, n_experts: int) -> float:
    """``1 / (4 c_k^2 sqrt(T)) + 2 log(J) / sqrt(T)``."""
    if c_k <= 0 or T <= 0:
        raise InvalidInputError("expert regret bound needs c_k > 0 and T > 0")
    root_t = math.sqrt(T)
    return 1.0 / (4.0 * c_k**2 * root_t) + 2.0 * math.log(n_experts) / root_t


def telescoping_residual(diag: TheoremDiagnostics, bank: QuantileBank, k: int) -> float:
    """``|tau_T - tau_0 - eta2 * sum_t Delta (alpha - 1{s < tau})|`` for class ``k``."""
    return abs(bank.tau[k] - bank.tau0[k] - bank.eta2 * diag.telescoping_sum[k])


def attach_expert_losses(diag: TheoremDiagnostics, bank: ExpertBank) -> None:
    """Copy the expert bank's final losses into the diagnostics."""
    diag.expert_losses = bank.losses.copy()
