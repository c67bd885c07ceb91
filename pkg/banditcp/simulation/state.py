"""Mutable state of one online run."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from banditcp.conformal.experts import ExpertBank, aggregate_all
from banditcp.conformal.quantile import QuantileBank
from banditcp.metrics.accumulator import (CoverageAccumulator, acum_cvg_extrema, acum_size,
                                          arm_accuracy, class_coverage)
from banditcp.metrics.diagnostics import TheoremDiagnostics
from banditcp.model.network import LossMonitor, ModelParameters

ThresholdBank = Union[QuantileBank, ExpertBank]


@dataclass
class RandomStreams:
    """Independent generators for each source of randomness in a run."""

    data: np.random.Generator
    arms: np.random.Generator
    u: np.random.Generator
    init: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "RandomStreams":
        data, arms, u, init = np.random.SeedSequence(seed).spawn(4)
        return cls(
            data=np.random.default_rng(data),
            arms=np.random.default_rng(arms),
            u=np.random.default_rng(u),
            init=np.random.default_rng(init),
        )


@dataclass(frozen=True)
class EventRecord:
    """One processed instance, kept for replaying the metrics."""

    t: int
    y: int
    covered: bool
    arm: int
    weight: float


@dataclass
class RunState:
    """
    Everything an online run mutates.

    ``instances`` counts processed stream records; ``batch_index`` counts
    completed batches.
    """

    params: ModelParameters
    bank: ThresholdBank
    accumulator: CoverageAccumulator
    diagnostics: TheoremDiagnostics
    monitor: LossMonitor = field(default_factory=LossMonitor)
    batch_index: int = 0
    instances: int = 0
    rows: List[Dict[str, float]] = field(default_factory=list)
    trace_rows: List[Tuple[int, int, float, float]] = field(default_factory=list)
    events: Optional[List[EventRecord]] = None

    @property
    def n_classes(self) -> int:
        return self.accumulator.n_classes

    def prediction_thresholds(self) -> np.ndarray:
        """Thresholds used to issue prediction sets right now."""
        if isinstance(self.bank, ExpertBank):
            return aggregate_all(self.bank)
        return self.bank.thresholds()

    def snapshot_row(self) -> Dict[str, float]:
        """Append and return the current metrics row."""
        acc = self.accumulator
        lowest, highest = acum_cvg_extrema(acc)
        size = acum_size(acc)
        row: Dict[str, float] = {
            "step": self.instances,
            "acum_cvg_min": np.nan if lowest is None else lowest,
            "acum_cvg_max": np.nan if highest is None else highest,
            "acum_size": np.nan if size is None else size,
            "cum_ce_loss": acc.ce_loss_sum,
        }
        for k, value in enumerate(class_coverage(acc)):
            row[f"cvg_class_{k}"] = value
        window = acc.take_window_size()
        row["set_size"] = np.nan if window is None else window
        for k, value in enumerate(arm_accuracy(acc)):
            row[f"arm_acc_class_{k}"] = value
        self.rows.append(row)
        return row
