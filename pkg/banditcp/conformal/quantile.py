"""Per-class quantile tracking by stochastic subgradient on the check loss."""

from dataclasses import dataclass, field

import numpy as np

from banditcp.errors import InvalidInputError


@dataclass
class QuantileBank:
    """
    One threshold per class, all starting at zero.

    ``alpha`` and ``eta2`` are fixed for the lifetime of the bank.
    """

    tau: np.ndarray
    alpha: float
    eta2: float
    tau0: np.ndarray = field(default=None)

    def __post_init__(self):
        self.tau = np.asarray(self.tau, dtype=float).copy()
        if self.tau0 is None:
            self.tau0 = self.tau.copy()
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.eta2 > 0:
            raise InvalidInputError(f"eta2 must be > 0, got {self.eta2}")

    @classmethod
    def initial(cls, n_classes: int, alpha: float, eta2: float) -> "QuantileBank":
        return cls(tau=np.zeros(n_classes), alpha=alpha, eta2=eta2)

    @property
    def n_classes(self) -> int:
        return self.tau.shape[0]

    def thresholds(self) -> np.ndarray:
        """Snapshot of the current thresholds."""
        return self.tau.copy()


def quantile_step(bank: QuantileBank, k: int, s_k: float, delta_k: float) -> QuantileBank:
    """
    Move ``tau_k`` by ``eta2 * delta_k * (alpha - 1{s_k < tau_k})``.

    ``s_k`` must come from the model before this step's update. A zero
    ``delta_k`` leaves the bank untouched.

    Returns:
        The same bank, updated in place
    """
    if delta_k == 0:
        return bank
    tau_k = bank.tau[k]
    bank.tau[k] = tau_k + bank.eta2 * delta_k * (bank.alpha - float(s_k < tau_k))
    return bank
