"""Data loading utilities: mixture presets, delimited files and stream assembly."""

import json
import logging
import os
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence

import numpy as np

from banditcp.data.gaussian import GaussianMixtureSpec, gm_stream
from banditcp.data.records import DataSource, DataSpec, StreamRecord
from banditcp.errors import DataFormatError, InvalidInputError

logger = logging.getLogger(__name__)

# Base paths
MODULE_DIR = os.path.dirname(os.path.abspath(__file__))
PRESET_DIR = os.path.join(MODULE_DIR, "presets")


def available_presets() -> List[str]:
    """Names of the packaged mixture presets."""
    return sorted(
        name[: -len(".json")] for name in os.listdir(PRESET_DIR) if name.endswith(".json")
    )


def load_mixture_preset(name: str) -> GaussianMixtureSpec:
    """
    Load a packaged Gaussian-mixture preset.

    Args:
        name: Preset name, for example ``separated3``

    Returns:
        The mixture specification

    Raises:
        InvalidInputError: If the preset is unknown or malformed
    """
    file_path = os.path.join(PRESET_DIR, f"{name.lower()}.json")

    try:
        with open(file_path, "r") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise InvalidInputError(
            f"unknown mixture preset '{name}', choose from {available_presets()}"
        )
    except json.JSONDecodeError as e:
        logger.error(f"Error parsing JSON from {file_path}: {str(e)}")
        raise InvalidInputError(f"invalid JSON in mixture preset: {file_path}")

    for key in ("priors", "means"):
        if key not in data:
            raise InvalidInputError(f"missing required field '{key}' in {file_path}")
    data.setdefault("sigma2", 1.0)

    logger.debug(f"Loaded mixture preset {name} from {file_path}")
    return GaussianMixtureSpec(
        priors=np.array(data["priors"], dtype=float),
        means=np.array(data["means"], dtype=float),
        sigma2=float(data["sigma2"]),
        name=name,
    )


def _parse_line(
    fields: Sequence[str], n_features: int, n_classes: Optional[int], path: str, line_no: int
) -> StreamRecord:
    if len(fields) != n_features + 1:
        raise DataFormatError(
            f"expected {n_features} features and a label, got {len(fields)} fields",
            path=path,
            line=line_no,
        )
    try:
        x = np.array([float(v) for v in fields[:-1]])
    except ValueError:
        raise DataFormatError("feature is not a number", path=path, line=line_no)
    if not np.all(np.isfinite(x)):
        raise DataFormatError("feature is not finite", path=path, line=line_no)
    try:
        label = int(fields[-1])
    except ValueError:
        raise DataFormatError(f"label '{fields[-1]}' is not an integer", path=path, line=line_no)
    upper = n_classes if n_classes is not None else label
    if label < 1 or label > upper:
        raise DataFormatError(
            f"label {label} outside 1..{n_classes if n_classes is not None else 'K'}",
            path=path,
            line=line_no,
        )
    return StreamRecord(x=x, y=label - 1)


def file_stream(path: str, spec: DataSpec) -> Iterator[StreamRecord]:
    """
    Read records from a delimited text file in file order.

    Each line holds the features followed by an integer label in ``1..K``;
    labels are shifted to ``0..K-1`` on read. Blank lines are skipped. When
    ``spec.n_features`` is unset the first data line fixes it.

    Args:
        path: File to read
        spec: Schema (feature count, class count, header flag, delimiter)

    Yields:
        Stream records

    Raises:
        DataFormatError: On a missing file or a malformed line, naming the line
    """
    if not os.path.exists(path):
        raise DataFormatError("file not found", path=path)

    n_features = spec.n_features
    with open(path, "r") as f:
        for line_no, line in enumerate(f, start=1):
            if spec.header and line_no == 1:
                continue
            line = line.strip()
            if not line:
                continue
            fields = line.split(spec.delimiter) if spec.delimiter else line.split()
            fields = [v.strip() for v in fields]
            if n_features is None:
                n_features = len(fields) - 1
                if n_features < 1:
                    raise DataFormatError("need at least one feature", path=path, line=line_no)
            yield _parse_line(fields, n_features, spec.n_classes, path, line_no)


def load_dataset(path: str, spec: DataSpec) -> List[StreamRecord]:
    """Read a whole delimited file into memory."""
    records = list(file_stream(path, spec))
    logger.info(f"Loaded {len(records)} records from {path}")
    return records


def pass_stream(
    records: Sequence[StreamRecord], rng: np.random.Generator, n: int, shuffle: bool = True
) -> Iterator[StreamRecord]:
    """
    Yield ``n`` records by passing over a finite dataset without replacement.

    A fresh permutation is drawn for every pass when ``shuffle`` is set;
    otherwise passes repeat the file order.
    """
    if n > 0 and not records:
        raise InvalidInputError("cannot stream from an empty dataset")
    emitted = 0
    passes = 0
    while emitted < n:
        order = rng.permutation(len(records)) if shuffle else range(len(records))
        if passes > 0:
            logger.debug(f"Starting pass {passes + 1} over {len(records)} records")
        for i in order:
            if emitted == n:
                break
            yield records[i]
            emitted += 1
        passes += 1


@dataclass
class OpenedSource:
    """A ready record stream plus what the rest of the run needs to know about it."""

    stream: Iterator[StreamRecord]
    n_features: int
    n_classes: int
    mixture: Optional[GaussianMixtureSpec] = None


def open_source(spec: DataSpec, rng: np.random.Generator, n: int) -> OpenedSource:
    """
    Build the record stream of ``n`` instances described by ``spec``.

    Raises:
        InvalidInputError: On an unknown preset or unusable file
    """
    if spec.source == DataSource.GAUSSIAN_MIXTURE:
        mixture = load_mixture_preset(spec.preset)
        return OpenedSource(
            stream=gm_stream(mixture, rng, n),
            n_features=mixture.n_features,
            n_classes=mixture.n_classes,
            mixture=mixture,
        )

    records = load_dataset(spec.path, spec)
    if not records:
        raise DataFormatError("dataset is empty", path=spec.path)
    n_features = records[0].x.shape[0]
    n_classes = spec.n_classes or max(2, max(r.y for r in records) + 1)
    if len(records) < n:
        logger.info(
            f"Dataset has {len(records)} records for T={n}; reshuffling between passes"
        )
    return OpenedSource(
        stream=pass_stream(records, rng, n, shuffle=spec.shuffle),
        n_features=n_features,
        n_classes=n_classes,
    )
