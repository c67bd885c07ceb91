"""Isotropic Gaussian-mixture stream with a closed-form class posterior."""

import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, Tuple

import numpy as np

from banditcp.core.models import ProbVector
from banditcp.data.records import StreamRecord
from banditcp.errors import InvalidInputError

logger = logging.getLogger(__name__)

SAMPLE_CHUNK = 4096


@dataclass
class GaussianMixtureSpec:
    """
    K Gaussian classes in d dimensions sharing the covariance ``sigma2 * I``.

    Attributes:
        priors: Class probabilities p_k, shape (K,)
        means: Class means, shape (K, d)
        sigma2: Shared variance
        name: Optional preset name
    """

    priors: np.ndarray
    means: np.ndarray
    sigma2: float = 1.0
    name: str = "custom"

    def __post_init__(self):
        self.priors = np.asarray(self.priors, dtype=float)
        self.means = np.atleast_2d(np.asarray(self.means, dtype=float))
        if self.priors.ndim != 1 or self.priors.shape[0] < 2:
            raise InvalidInputError("a mixture needs at least 2 classes")
        if self.means.shape[0] != self.priors.shape[0]:
            raise InvalidInputError(
                f"{self.priors.shape[0]} priors but {self.means.shape[0]} means"
            )
        if np.any(self.priors < 0) or abs(self.priors.sum() - 1.0) > 1e-9:
            raise InvalidInputError("priors must be non-negative and sum to 1")
        if not np.all(np.isfinite(self.means)):
            raise InvalidInputError("means must be finite")
        if not self.sigma2 > 0:
            raise InvalidInputError(f"sigma2 must be > 0, got {self.sigma2}")

    @property
    def n_classes(self) -> int:
        return self.priors.shape[0]

    @property
    def n_features(self) -> int:
        return self.means.shape[1]


def gm_sample_arrays(
    spec: GaussianMixtureSpec, rng: np.random.Generator, n: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` i.i.d. pairs as arrays ``(X (n, d), y (n,))``."""
    if n < 0:
        raise InvalidInputError(f"n must be >= 0, got {n}")
    labels = rng.choice(spec.n_classes, size=n, p=spec.priors)
    noise = rng.standard_normal((n, spec.n_features))
    features = spec.means[labels] + np.sqrt(spec.sigma2) * noise
    return features, labels


def gm_sample(spec: GaussianMixtureSpec, rng: np.random.Generator, n: int) -> List[StreamRecord]:
    """
    Draw ``n`` i.i.d. records: ``y ~ Categorical(priors)``, ``x ~ N(mean_y, sigma2 I)``.
    """
    features, labels = gm_sample_arrays(spec, rng, n)
    return [StreamRecord(x=features[i], y=int(labels[i])) for i in range(n)]


def gm_stream(
    spec: GaussianMixtureSpec, rng: np.random.Generator, n: int
) -> Iterator[StreamRecord]:
    """Lazily yield ``n`` mixture records, sampled in fixed-size chunks."""
    remaining = n
    while remaining > 0:
        chunk = min(SAMPLE_CHUNK, remaining)
        yield from gm_sample(spec, rng, chunk)
        remaining -= chunk


def gm_posterior(spec: GaussianMixtureSpec, x: np.ndarray) -> ProbVector:
    """
    Exact class posterior ``P(Y=k | x)`` for one point (d,) or a batch (n, d).

    Computed in log space with the maximum subtracted before exponentiating.
    """
    x = np.asarray(x, dtype=float)
    batch = x[None, :] if x.ndim == 1 else x
    if batch.shape[-1] != spec.n_features:
        raise InvalidInputError(
            f"expected features of dimension {spec.n_features}, got shape {x.shape}"
        )
    sq_dist = ((batch[:, None, :] - spec.means[None, :, :]) ** 2).sum(axis=2)
    with np.errstate(divide="ignore"):
        log_prior = np.log(spec.priors)
    log_joint = log_prior[None, :] - sq_dist / (2.0 * spec.sigma2)
    log_joint -= log_joint.max(axis=1, keepdims=True)
    joint = np.exp(log_joint)
    posterior = joint / joint.sum(axis=1, keepdims=True)
    return posterior[0] if x.ndim == 1 else posterior


def two_class_bayes_accuracy(spec: GaussianMixtureSpec) -> float:
    """
    Accuracy of the Bayes classifier for a two-class mixture.

    With ``D = ||mu_1 - mu_0|| / sigma`` and ``r = log(p_0 / p_1)``, the
    accuracy is ``p_0 Phi(D/2 + r/D) + p_1 Phi(D/2 - r/D)``.
    """
    if spec.n_classes != 2:
        raise InvalidInputError("closed-form Bayes accuracy needs exactly 2 classes")
    p0, p1 = spec.priors
    if p0 == 0 or p1 == 0:
        return 1.0
    distance = float(np.linalg.norm(spec.means[1] - spec.means[0]) / np.sqrt(spec.sigma2))
    if distance == 0:
        return float(max(p0, p1))
    log_ratio = math.log(p0 / p1)

    def _phi(z: float) -> float:
        return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))

    return float(
        p0 * _phi(distance / 2 + log_ratio / distance)
        + p1 * _phi(distance / 2 - log_ratio / distance)
    )
