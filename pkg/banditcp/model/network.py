"""Softmax classifier trained online on the bandit cross-entropy loss."""

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from banditcp.core.models import ProbVector
from banditcp.core.simplex import softmax_transform
from banditcp.errors import InvalidInputError

logger = logging.getLogger(__name__)

LOG_CLAMP = 1e-12

LINEAR_TENSORS = ("W1", "b1")
HIDDEN_TENSORS = ("W1", "b1", "W2", "b2")


@dataclass
class ModelParameters:
    """
    Weights of a linear or one-hidden-layer softmax classifier.

    A linear model holds ``W1`` (K, d) and ``b1`` (K,). A hidden-layer model
    holds ``W1`` (H, d), ``b1`` (H,), ``W2`` (K, H) and ``b2`` (K,) with a
    rectifier between the layers.
    """

    tensors: Dict[str, np.ndarray]

    def __post_init__(self):
        names = tuple(self.tensors)
        if names not in (LINEAR_TENSORS, HIDDEN_TENSORS):
            raise InvalidInputError(f"unexpected tensor names {names}")
        for name, value in self.tensors.items():
            if not np.all(np.isfinite(value)):
                raise InvalidInputError(f"parameter {name} is not finite")

    @property
    def is_linear(self) -> bool:
        return "W2" not in self.tensors

    @property
    def n_features(self) -> int:
        return self.tensors["W1"].shape[1]

    @property
    def n_classes(self) -> int:
        return self.tensors["b1" if self.is_linear else "b2"].shape[0]

    @property
    def hidden_units(self) -> int:
        return 0 if self.is_linear else self.tensors["b1"].shape[0]

    def items(self) -> Iterator[Tuple[str, np.ndarray]]:
        return iter(self.tensors.items())

    def copy(self) -> "ModelParameters":
        return ModelParameters({name: value.copy() for name, value in self.tensors.items()})


@dataclass
class GradientBundle:
    """One gradient entry per model parameter, keyed like ``ModelParameters``."""

    tensors: Dict[str, np.ndarray]

    @classmethod
    def zeros_like(cls, params: ModelParameters) -> "GradientBundle":
        return cls({name: np.zeros_like(value) for name, value in params.items()})

    def matches(self, params: ModelParameters) -> bool:
        return tuple(self.tensors) == tuple(params.tensors) and all(
            self.tensors[name].shape == value.shape for name, value in params.items()
        )


@dataclass
class LossMonitor:
    """Counts log-argument clamps in the bandit cross-entropy loss."""

    saturated: int = 0

    def record(self, count: int) -> None:
        if count <= 0:
            return
        if self.saturated == 0:
            logger.warning(
                f"Bandit CE loss hit a zero probability; clamping log argument at {LOG_CLAMP}"
            )
        self.saturated += count


def init_parameters(
    n_features: int, n_classes: int, hidden: int, rng: np.random.Generator
) -> ModelParameters:
    """
    Draw initial weights uniformly in ``[-1/sqrt(fan_in), 1/sqrt(fan_in)]``.

    Biases start at zero. ``hidden=0`` builds the linear model.
    """
    if n_features < 1 or n_classes < 2 or hidden < 0:
        raise InvalidInputError(
            f"invalid architecture d={n_features}, K={n_classes}, H={hidden}"
        )

    def _uniform(rows: int, cols: int) -> np.ndarray:
        bound = 1.0 / np.sqrt(cols)
        return rng.uniform(-bound, bound, size=(rows, cols))

    if hidden == 0:
        return ModelParameters({
            "W1": _uniform(n_classes, n_features),
            "b1": np.zeros(n_classes),
        })
    return ModelParameters({
        "W1": _uniform(hidden, n_features),
        "b1": np.zeros(hidden),
        "W2": _uniform(n_classes, hidden),
        "b2": np.zeros(n_classes),
    })


def _as_batch(params: ModelParameters, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    batch = x[None, :] if x.ndim == 1 else x
    if batch.ndim != 2 or batch.shape[1] != params.n_features:
        raise InvalidInputError(
            f"expected features of dimension {params.n_features}, got shape {x.shape}"
        )
    if not np.all(np.isfinite(batch)):
        raise InvalidInputError("features must be finite")
    return batch


def _forward_batch(params: ModelParameters, batch: np.ndarray):
    t = params.tensors
    if params.is_linear:
        logits = batch @ t["W1"].T + t["b1"]
        hidden_pre = None
    else:
        hidden_pre = batch @ t["W1"].T + t["b1"]
        logits = np.maximum(hidden_pre, 0.0) @ t["W2"].T + t["b2"]
    return logits, hidden_pre


def forward(params: ModelParameters, x: np.ndarray) -> Tuple[np.ndarray, ProbVector]:
    """
    Compute logits and class probabilities.

    Args:
        params: Model weights
        x: Features, shape (d,) or a batch (n, d)

    Returns:
        Tuple of (logits, probabilities), each (K,) or (n, K) to match ``x``

    Raises:
        InvalidInputError: On a dimension mismatch or non-finite features
    """
    batch = _as_batch(params, x)
    logits, _ = _forward_batch(params, batch)
    probs = softmax_transform(logits)
    if np.asarray(x).ndim == 1:
        return logits[0], probs[0]
    return logits, probs


def bandit_ce_loss(
    probs: ProbVector, delta, monitor: Optional[LossMonitor] = None
) -> float:
    """
    Bandit cross-entropy ``-sum_k Delta_k * log p_k``.

    ``delta`` is a :class:`~banditcp.policy.feedback.DeltaEstimate` or a dense
    per-class array. A zero probability on the support of ``delta`` is
    clamped at 1e-12 and counted on ``monitor``.
    """
    dense = delta.as_array() if hasattr(delta, "as_array") else np.asarray(delta, dtype=float)
    probs = np.asarray(probs, dtype=float)
    support = dense > 0
    if not np.any(support):
        return 0.0
    support_probs = probs[support]
    clamped = support_probs < LOG_CLAMP
    if monitor is not None:
        monitor.record(int(np.count_nonzero(clamped)))
    return float(-np.sum(dense[support] * np.log(np.maximum(support_probs, LOG_CLAMP))))


def _batch_gradient(
    params: ModelParameters,
    batch: np.ndarray,
    arms: np.ndarray,
    weights: np.ndarray,
) -> Tuple[GradientBundle, np.ndarray]:
    """Mean gradient over the batch plus the per-row probabilities."""
    n = batch.shape[0]
    logits, hidden_pre = _forward_batch(params, batch)
    probs = softmax_transform(logits)

    # d loss / d logits = w * (p - e_A) for every row
    grad_logits = probs.copy()
    grad_logits[np.arange(n), arms] -= 1.0
    grad_logits *= weights[:, None]

    t = params.tensors
    if params.is_linear:
        grads = {
            "W1": grad_logits.T @ batch / n,
            "b1": grad_logits.sum(axis=0) / n,
        }
    else:
        hidden_act = np.maximum(hidden_pre, 0.0)
        grad_hidden = (grad_logits @ t["W2"]) * (hidden_pre > 0.0)
        grads = {
            "W1": grad_hidden.T @ batch / n,
            "b1": grad_hidden.sum(axis=0) / n,
            "W2": grad_logits.T @ hidden_act / n,
            "b2": grad_logits.sum(axis=0) / n,
        }
    return GradientBundle(grads), probs


def bandit_ce_gradient(params: ModelParameters, x: np.ndarray, delta) -> GradientBundle:
    """
    Backpropagated gradient of :func:`bandit_ce_loss` for one instance.

    At the logit layer the gradient is ``w * (p - e_A)`` with ``w`` the
    estimate's weight at the pulled arm ``A``.
    """
    batch = _as_batch(params, x)
    if batch.shape[0] != 1:
        raise InvalidInputError("bandit_ce_gradient takes a single instance")
    grads, _ = _batch_gradient(
        params, batch, np.array([delta.arm]), np.array([float(delta.weight)])
    )
    return grads


def sgd_step(params: ModelParameters, grad: GradientBundle, eta1: float) -> ModelParameters:
    """Return ``params - eta1 * grad`` as new parameters."""
    if not grad.matches(params):
        raise InvalidInputError("gradient shape does not match the parameters")
    if eta1 < 0:
        raise InvalidInputError(f"eta1 must be non-negative, got {eta1}")
    return ModelParameters({
        name: value - eta1 * grad.tensors[name] for name, value in params.items()
    })


def batch_update(
    params: ModelParameters,
    features: np.ndarray,
    deltas,
    eta1: float,
    monitor: Optional[LossMonitor] = None,
) -> Tuple[ModelParameters, float]:
    """
    Take one SGD step on the mean bandit cross-entropy of a batch.

    Every forward pass uses the pre-update parameters.

    Args:
        params: Current weights
        features: Batch features, shape (n, d)
        deltas: Sequence of ``DeltaEstimate``, one per row
        eta1: Model learning rate
        monitor: Optional saturation counter

    Returns:
        Tuple of (updated parameters, mean loss over the batch)

    Raises:
        InvalidInputError: If the batch is empty or shapes disagree
    """
    deltas = list(deltas)
    if not deltas:
        raise InvalidInputError("batch_update needs a non-empty batch")
    batch = _as_batch(params, np.atleast_2d(features))
    if batch.shape[0] != len(deltas):
        raise InvalidInputError(f"{batch.shape[0]} feature rows for {len(deltas)} estimates")

    arms = np.array([d.arm for d in deltas], dtype=int)
    weights = np.array([d.weight for d in deltas], dtype=float)
    return update_from_arrays(params, batch, arms, weights, eta1, monitor)


def update_from_arrays(
    params: ModelParameters,
    batch: np.ndarray,
    arms: np.ndarray,
    weights: np.ndarray,
    eta1: float,
    monitor: Optional[LossMonitor] = None,
) -> Tuple[ModelParameters, float]:
    """Array form of :func:`batch_update` used by the online engine."""
    grads, probs = _batch_gradient(params, batch, arms, weights)
    losses = per_instance_loss(probs, arms, weights, monitor)
    if not np.any(weights > 0):
        return params.copy(), 0.0
    return sgd_step(params, grads, eta1), float(losses.mean())


def per_instance_loss(
    probs: np.ndarray,
    arms: np.ndarray,
    weights: np.ndarray,
    monitor: Optional[LossMonitor] = None,
) -> np.ndarray:
    """Bandit cross-entropy of each row given its pulled arm and weight."""
    arm_probs = probs[np.arange(len(arms)), arms]
    active = weights > 0
    if monitor is not None:
        monitor.record(int(np.count_nonzero(active & (arm_probs < LOG_CLAMP))))
    losses = np.zeros(len(arms))
    losses[active] = -weights[active] * np.log(np.maximum(arm_probs[active], LOG_CLAMP))
    return losses
