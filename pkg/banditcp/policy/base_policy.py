"""Base policy class defining the interface for all arm-pulling policies."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from banditcp.core.models import ProbVector
from banditcp.errors import InvalidInputError


class PolicyKind(str, Enum):
    """Arm-pulling policies."""

    UNIFORM = "uniform"
    SOFTMAX = "softmax"
    BAYES_ORACLE = "bayes_oracle"
    LABEL_ORACLE = "label_oracle"


@dataclass(frozen=True)
class PolicySpec:
    """
    Policy selection plus the probability floor.

    Every class keeps at least ``floor`` probability after mixing with the
    uniform distribution: ``pi <- (1 - K * floor) * pi + floor``.
    """

    kind: PolicyKind = PolicyKind.SOFTMAX
    floor: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        if not np.isfinite(self.floor) or self.floor < 0:
            raise InvalidInputError(f"floor must be >= 0, got {self.floor}")

    @property
    def needs_true_posterior(self) -> bool:
        return self.kind == PolicyKind.BAYES_ORACLE

    @property
    def needs_labels(self) -> bool:
        return self.kind == PolicyKind.LABEL_ORACLE

    def min_probability(self, n_classes: int) -> float:
        """Lower bound c_k on every policy probability (uniform: 1/K)."""
        if self.kind == PolicyKind.UNIFORM:
            return 1.0 / n_classes
        return self.floor


@dataclass
class PolicyContext:
    """
    What a policy may look at for a batch of queries.

    Only the oracle policies read ``true_posterior`` or ``labels``; the engine
    leaves them ``None`` for every other policy.
    """

    n_classes: int
    model_probs: Optional[np.ndarray] = None
    true_posterior: Optional[np.ndarray] = None
    labels: Optional[np.ndarray] = None
    n_rows: Optional[int] = None

    def rows(self) -> int:
        for source in (self.model_probs, self.true_posterior):
            if source is not None:
                return 1 if np.ndim(source) == 1 else source.shape[0]
        if self.labels is not None:
            return int(np.size(self.labels))
        return self.n_rows if self.n_rows is not None else 1


class BasePolicy(ABC):
    """
    Abstract base class for arm-pulling policies.

    Subclasses produce raw probabilities; the base class applies the floor.
    """

    kind: PolicyKind

    def __init__(self, spec: PolicySpec):
        self.spec = spec

    @abstractmethod
    def raw_probabilities(self, context: PolicyContext) -> np.ndarray:
        """
        Policy probabilities before the floor, shape (n, K).

        Args:
            context: Model/oracle information for the batch

        Returns:
            One probability row per query
        """
        pass

    def probabilities(self, context: PolicyContext) -> ProbVector:
        """
        Floor-mixed policy probabilities, shape (n, K).

        Raises:
            InvalidInputError: If the floor exceeds 1/K
        """
        n_classes = context.n_classes
        floor = self.spec.floor
        if floor > 1.0 / n_classes:
            raise InvalidInputError(f"floor {floor} exceeds 1/K = {1.0 / n_classes}")
        pi = np.atleast_2d(np.asarray(self.raw_probabilities(context), dtype=float))
        if floor > 0:
            pi = (1.0 - n_classes * floor) * pi + floor
        return pi
