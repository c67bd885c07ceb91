"""Pytest fixtures for bandit conformal tests."""

import logging

import numpy as np
import pytest

from banditcp.config import RunConfig, parse_config
from banditcp.data.gaussian import GaussianMixtureSpec
from banditcp.data.loaders import load_mixture_preset
from banditcp.model.network import ModelParameters


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for test data."""
    return np.random.default_rng(20240611)


@pytest.fixture
def mock_mixture() -> GaussianMixtureSpec:
    """Well-separated three-class mixture."""
    return load_mixture_preset("separated3")


@pytest.fixture
def binary_mixture() -> GaussianMixtureSpec:
    """Balanced two-class mixture."""
    return load_mixture_preset("binary")


@pytest.fixture
def linear_params() -> ModelParameters:
    """Small linear model with non-trivial weights (d=2, K=3)."""
    return ModelParameters({
        "W1": np.array([[0.5, -0.2], [0.1, 0.3], [-0.4, 0.2]]),
        "b1": np.array([0.05, -0.1, 0.0]),
    })


@pytest.fixture
def base_config(tmp_path) -> RunConfig:
    """Short alg1 run on the mixture preset writing into a temporary directory."""
    return parse_config(overrides={
        "T": 600,
        "batch": 32,
        "policy": "uniform",
        "score": "aps",
        "eta1": 0.05,
        "eta2": 0.05,
        "reps": 2,
        "seed": 7,
        "out": str(tmp_path / "runs"),
    })


@pytest.fixture
def config_file(tmp_path):
    """Write a key=value configuration file and return its path."""

    def _write(text: str) -> str:
        path = tmp_path / "run.cfg"
        path.write_text(text)
        return str(path)

    return _write


@pytest.fixture(autouse=True)
def suppress_logging():
    """Suppress verbose logging during tests."""
    logging.basicConfig(level=logging.ERROR)
