"""Line-oriented text snapshots of model parameters."""

import logging
import os
from typing import Dict

import numpy as np

from banditcp.errors import DataFormatError
from banditcp.model.network import ModelParameters

logger = logging.getLogger(__name__)


def save_parameters(params: ModelParameters, path: str) -> None:
    """
    Write parameters as ``name<TAB>shape<TAB>values`` lines.

    Shapes are comma-separated, values are row-major ``repr`` floats separated
    by spaces, so the file reproduces the weights bit for bit.
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w") as f:
        for name, value in params.items():
            shape = ",".join(str(dim) for dim in value.shape)
            values = " ".join(repr(float(v)) for v in value.ravel())
            f.write(f"{name}\t{shape}\t{values}\n")
    logger.debug(f"Saved parameter snapshot to {path}")


def load_parameters(path: str) -> ModelParameters:
    """
    Read a snapshot written by :func:`save_parameters`.

    Raises:
        DataFormatError: If a line is malformed
    """
    tensors: Dict[str, np.ndarray] = {}
    with open(path, "r") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataFormatError("expected name, shape and values", path, line_no)
            name, shape_text, values_text = parts
            try:
                shape = tuple(int(dim) for dim in shape_text.split(","))
                values = np.array([float(v) for v in values_text.split()], dtype=float)
                tensors[name] = values.reshape(shape)
            except ValueError as e:
                raise DataFormatError(f"bad tensor {name}: {e}", path, line_no)
    return ModelParameters(tensors)
