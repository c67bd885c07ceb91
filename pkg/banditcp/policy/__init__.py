"""
Arm-pulling policies for bandit feedback.

Policies turn model or oracle posteriors into arm probabilities; the feedback
helpers sample arms and build the inverse-propensity indicator estimate.
"""

from banditcp.policy.base_policy import BasePolicy, PolicyContext, PolicyKind, PolicySpec
from banditcp.policy.factory import PolicyFactory, policy_probs
from banditcp.policy.feedback import (DeltaEstimate, delta_from_feedback,
                                      feedback_weights, sample_arm, sample_arms)
from banditcp.policy.policies import (BayesOraclePolicy, LabelOraclePolicy,
                                      SoftmaxPolicy, UniformPolicy)

__all__ = [
    "BasePolicy",
    "PolicyContext",
    "PolicyKind",
    "PolicySpec",
    "PolicyFactory",
    "policy_probs",
    "UniformPolicy",
    "SoftmaxPolicy",
    "BayesOraclePolicy",
    "LabelOraclePolicy",
    "DeltaEstimate",
    "delta_from_feedback",
    "feedback_weights",
    "sample_arm",
    "sample_arms",
]
