"""Check (pinball) loss and its subgradient in the threshold."""

import numpy as np

from banditcp.errors import InvalidInputError


def _validate(s, tau, alpha) -> None:
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"alpha must lie in (0, 1), got {alpha}")
    if not (np.all(np.isfinite(s)) and np.all(np.isfinite(tau))):
        raise InvalidInputError("score and threshold must be finite")


def check_loss(s, tau, alpha: float):
    """
    Evaluate ``rho_alpha(s, tau) = (s - tau) * (alpha - 1{s < tau})``.

    Works elementwise on numpy arrays; scalars in give a float out.

    Args:
        s: Conformity score(s)
        tau: Threshold(s)
        alpha: Non-coverage rate in (0, 1)

    Returns:
        Non-negative loss, zero exactly when ``s == tau``

    Raises:
        InvalidInputError: If ``alpha`` is outside (0, 1) or inputs are not finite
    """
    _validate(s, tau, alpha)
    diff = np.subtract(s, tau)
    loss = diff * (alpha - (diff < 0.0))
    return float(loss) if np.ndim(loss) == 0 else loss


def check_subgradient(s, tau, alpha: float):
    """
    Subgradient of :func:`check_loss` in ``tau``: ``-(alpha - 1{s < tau})``.

    The indicator is strict, so ``s == tau`` yields ``-alpha``.
    """
    _validate(s, tau, alpha)
    grad = -(alpha - np.less(s, tau))
    return float(grad) if np.ndim(grad) == 0 else grad


def weighted_check_loss(scores, weights, tau: float, alpha: float) -> float:
    """Total ``sum_i w_i * rho_alpha(s_i, tau)`` for non-negative weights."""
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0):
        raise InvalidInputError("weights must be non-negative")
    return float(np.sum(weights * check_loss(np.asarray(scores, dtype=float), tau, alpha)))
