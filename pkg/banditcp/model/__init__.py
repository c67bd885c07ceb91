"""
Model module for bandit conformal prediction.

This module provides the linear / one-hidden-layer softmax classifier, its
bandit cross-entropy loss and the SGD updates driven by bandit feedback.
"""

from banditcp.model.network import (GradientBundle, LossMonitor, ModelParameters,
                                    bandit_ce_gradient, bandit_ce_loss,
                                    batch_update, forward, init_parameters,
                                    per_instance_loss, sgd_step,
                                    update_from_arrays)
from banditcp.model.snapshot import load_parameters, save_parameters

__all__ = [
    "ModelParameters",
    "GradientBundle",
    "LossMonitor",
    "init_parameters",
    "forward",
    "bandit_ce_loss",
    "bandit_ce_gradient",
    "sgd_step",
    "batch_update",
    "update_from_arrays",
    "per_instance_loss",
    "save_parameters",
    "load_parameters",
]
