"""Concrete arm-pulling policies."""

import numpy as np

from banditcp.errors import InvalidInputError
from banditcp.policy.base_policy import BasePolicy, PolicyContext, PolicyKind


class UniformPolicy(BasePolicy):
    """Pulls every arm with probability 1/K regardless of the context."""

    kind = PolicyKind.UNIFORM

    def raw_probabilities(self, context: PolicyContext) -> np.ndarray:
        return np.full((context.rows(), context.n_classes), 1.0 / context.n_classes)


class SoftmaxPolicy(BasePolicy):
    """Pulls arms according to the current model posterior."""

    kind = PolicyKind.SOFTMAX

    def raw_probabilities(self, context: PolicyContext) -> np.ndarray:
        if context.model_probs is None:
            raise InvalidInputError("softmax policy needs the model posterior")
        return np.atleast_2d(context.model_probs)


class BayesOraclePolicy(BasePolicy):
    """Pulls arms according to the true class posterior (synthetic data only)."""

    kind = PolicyKind.BAYES_ORACLE

    def raw_probabilities(self, context: PolicyContext) -> np.ndarray:
        if context.true_posterior is None:
            raise InvalidInputError("bayes_oracle policy needs the true posterior")
        return np.atleast_2d(context.true_posterior)


class LabelOraclePolicy(BasePolicy):
    """Test-only policy that always pulls the true label."""

    kind = PolicyKind.LABEL_ORACLE

    def raw_probabilities(self, context: PolicyContext) -> np.ndarray:
        if context.labels is None:
            raise InvalidInputError("label_oracle policy needs the labels")
        labels = np.atleast_1d(np.asarray(context.labels, dtype=int))
        pi = np.zeros((labels.size, context.n_classes))
        pi[np.arange(labels.size), labels] = 1.0
        return pi
