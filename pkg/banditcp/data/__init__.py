"""
Data module for bandit conformal runs.

Provides the synthetic Gaussian-mixture stream, delimited-file datasets and
batching.
"""

from banditcp.data.batching import batch_iterator
from banditcp.data.gaussian import (GaussianMixtureSpec, gm_posterior, gm_sample,
                                    gm_sample_arrays, gm_stream, two_class_bayes_accuracy)
from banditcp.data.loaders import (OpenedSource, available_presets, file_stream,
                                   load_dataset, load_mixture_preset, open_source,
                                   pass_stream)
from banditcp.data.records import Batch, DataSource, DataSpec, LabelSite, StreamRecord

__all__ = [
    "StreamRecord",
    "Batch",
    "DataSource",
    "DataSpec",
    "LabelSite",
    "GaussianMixtureSpec",
    "gm_sample",
    "gm_sample_arrays",
    "gm_stream",
    "gm_posterior",
    "two_class_bayes_accuracy",
    "file_stream",
    "load_dataset",
    "load_mixture_preset",
    "available_presets",
    "pass_stream",
    "open_source",
    "OpenedSource",
    "batch_iterator",
]
