"""Value types shared by the score, loss and policy code."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from banditcp.errors import InvalidInputError

# A point on the probability simplex over K classes, or a (n, K) stack of them.
ProbVector = np.ndarray

# Conformity scores s(X, k) for every class, same shape as the ProbVector they
# were computed from.
ScoreVector = np.ndarray


class ScoreKind(str, Enum):
    """Conformity score families."""

    SOFTMAX = "softmax"
    APS = "aps"
    RAPS = "raps"


@dataclass(frozen=True)
class ScoreSpec:
    """Conformity score selection.

    ``lam`` and ``k_reg`` only matter for RAPS: classes ranked below ``k_reg``
    in decreasing probability order are penalised by ``lam`` per rank.
    """

    kind: ScoreKind = ScoreKind.RAPS
    lam: float = 0.01
    k_reg: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", ScoreKind(self.kind))
        if not np.isfinite(self.lam) or self.lam < 0:
            raise InvalidInputError(f"lambda must be >= 0, got {self.lam}")
        if int(self.k_reg) != self.k_reg or self.k_reg < 1:
            raise InvalidInputError(f"k_reg must be an integer >= 1, got {self.k_reg}")

    def score_floor(self, n_classes: int) -> float:
        """Smallest score this family can produce for ``n_classes`` classes."""
        if self.kind == ScoreKind.RAPS:
            return -self.lam * max(0, n_classes - self.k_reg)
        return 0.0
