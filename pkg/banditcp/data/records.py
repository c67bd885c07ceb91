"""Stream records, batches and the label access sites."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from banditcp.errors import InvalidInputError, LabelLeakError

logger = logging.getLogger(__name__)


class LabelSite(str, Enum):
    """Places in the online loop allowed to read the true label."""

    FEEDBACK = "feedback"
    METRICS = "metrics"
    ORACLE = "oracle"


class DataSource(str, Enum):
    """Where stream records come from."""

    GAUSSIAN_MIXTURE = "gm"
    FILE = "file"


@dataclass(frozen=True)
class StreamRecord:
    """One observation: features ``x`` and its hidden class label ``y`` (0-based)."""

    x: np.ndarray
    y: int


@dataclass
class DataSpec:
    """Data source selection and file schema."""

    source: DataSource = DataSource.GAUSSIAN_MIXTURE
    preset: str = "separated3"
    path: Optional[str] = None
    n_features: Optional[int] = None
    n_classes: Optional[int] = None
    header: bool = False
    delimiter: Optional[str] = ","
    shuffle: bool = True
    shuffle_buffer: int = 0

    def __post_init__(self):
        self.source = DataSource(self.source)
        if self.source == DataSource.FILE and not self.path:
            raise InvalidInputError("file data needs a path")
        if self.shuffle_buffer < 0:
            raise InvalidInputError(f"shuffle_buffer must be >= 0, got {self.shuffle_buffer}")

    def describe(self) -> str:
        if self.source == DataSource.FILE:
            return f"file:{self.path}"
        return f"gm:{self.preset}"


@dataclass
class Batch:
    """
    Consecutive stream records processed together.

    Labels are read through :meth:`reveal`. With ``audit`` on, the plain
    ``labels`` attribute is poisoned so any other read fails loudly.
    """

    records: List[StreamRecord]
    index: int
    audit: bool = False
    reveals: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.records:
            raise InvalidInputError("a batch holds at least one record")
        self.features = np.stack([np.asarray(r.x, dtype=float) for r in self.records])
        self._labels = np.array([r.y for r in self.records], dtype=int)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def labels(self) -> np.ndarray:
        if self.audit:
            raise LabelLeakError(
                f"batch {self.index}: labels read outside a reveal site"
            )
        return self._labels

    def reveal(self, site) -> np.ndarray:
        """
        Hand out the labels to one of the allowed sites.

        Raises:
            LabelLeakError: If ``site`` is not a :class:`LabelSite`
        """
        try:
            site = LabelSite(site)
        except ValueError:
            raise LabelLeakError(f"batch {self.index}: label read from site '{site}'")
        self.reveals[site] = self.reveals.get(site, 0) + 1
        return self._labels
