"""Policy factory and the ``policy_probs`` entry point."""

from typing import Dict, Optional, Type

import numpy as np

from banditcp.core.models import ProbVector
from banditcp.policy.base_policy import BasePolicy, PolicyContext, PolicyKind, PolicySpec
from banditcp.policy.policies import (BayesOraclePolicy, LabelOraclePolicy,
                                      SoftmaxPolicy, UniformPolicy)


class PolicyFactory:
    """
    Factory class for creating policy instances from a ``PolicySpec``.

    Centralises the kind-to-class mapping so new policies only need to be
    registered here.
    """

    def __init__(self):
        self.policy_classes: Dict[PolicyKind, Type[BasePolicy]] = {
            PolicyKind.UNIFORM: UniformPolicy,
            PolicyKind.SOFTMAX: SoftmaxPolicy,
            PolicyKind.BAYES_ORACLE: BayesOraclePolicy,
            PolicyKind.LABEL_ORACLE: LabelOraclePolicy,
        }

    def create_policy(self, spec: PolicySpec) -> BasePolicy:
        """
        Create the policy described by ``spec``.

        Raises:
            ValueError: If no class is registered for the kind
        """
        policy_class = self.policy_classes.get(spec.kind)
        if not policy_class:
            raise ValueError(f"No policy class registered for kind: {spec.kind}")
        return policy_class(spec)


_factory = PolicyFactory()


def policy_probs(
    spec: PolicySpec,
    n_classes: int,
    model_probs: Optional[np.ndarray] = None,
    true_posterior: Optional[np.ndarray] = None,
    labels: Optional[np.ndarray] = None,
) -> ProbVector:
    """
    Policy probabilities for one query (1-D context) or a batch (2-D).

    Args:
        spec: Policy kind and floor
        n_classes: Number of classes K
        model_probs: Model posterior, needed by the softmax policy
        true_posterior: True posterior, needed by the Bayes oracle
        labels: True labels, needed by the label oracle

    Returns:
        Floor-mixed probabilities, shape (K,) for a single query else (n, K)

    Raises:
        InvalidInputError: If the context the policy needs is missing
    """
    context = PolicyContext(
        n_classes=n_classes,
        model_probs=model_probs,
        true_posterior=true_posterior,
        labels=labels,
    )
    pi = _factory.create_policy(spec).probabilities(context)
    single = all(
        source is None or np.ndim(source) <= 1
        for source in (model_probs, true_posterior)
    ) and (labels is None or np.ndim(labels) == 0)
    return pi[0] if single else pi
