"""Run summaries, their output files and cross-run aggregation."""

import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from banditcp.errors import DataFormatError, InvalidInputError
from banditcp.metrics.diagnostics import TheoremDiagnostics

logger = logging.getLogger(__name__)

NA = "NA"

BASE_COLUMNS = ["step", "acum_cvg_min", "acum_cvg_max", "acum_size", "cum_ce_loss"]


def class_columns(prefix: str, n_classes: int) -> List[str]:
    return [f"{prefix}_{k}" for k in range(n_classes)]


def metrics_columns(n_classes: int) -> List[str]:
    """Columns of the metrics file, in order."""
    return BASE_COLUMNS + class_columns("cvg_class", n_classes)


@dataclass
class RunSummary:
    """
    Everything one run reports.

    ``series`` holds one row per logged batch with the metrics-file columns
    plus ``set_size`` (mean set size since the previous row) and
    ``arm_acc_class_k``. ``final`` maps summary keys to values, None for
    absent ones.
    """

    seed: int
    config_hash: str
    n_classes: int
    series: pd.DataFrame
    final: Dict[str, Optional[float]] = field(default_factory=dict)
    diagnostics: Optional[TheoremDiagnostics] = None
    thresholds: Optional[np.ndarray] = None
    trace: Optional[pd.DataFrame] = None
    events: Optional[List[Any]] = None
    params: Optional[Any] = None

    @property
    def steps(self) -> int:
        return int(self.series["step"].iloc[-1]) if len(self.series) else 0

    def final_value(self, key: str) -> Optional[float]:
        return self.final.get(key)


def _fmt(value) -> str:
    if value is None:
        return NA
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return NA if np.isnan(value) else repr(float(value))
    return str(value)


def write_metrics_csv(summary: RunSummary, path: str) -> None:
    """Write the metrics time series; absent values become ``NA``."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    frame = summary.series[metrics_columns(summary.n_classes)]
    frame.to_csv(path, index=False, na_rep=NA, float_format="%.17g", lineterminator="\n")
    logger.debug(f"Wrote {len(frame)} metric rows to {path}")


def read_metrics_csv(path: str) -> pd.DataFrame:
    """Load a metrics file back into a frame (``NA`` reads as NaN)."""
    if not os.path.exists(path):
        raise DataFormatError("metrics file not found", path=path)
    return pd.read_csv(path, na_values=[NA])


def write_summary(summary: RunSummary, path: str) -> None:
    """Write the summary as ``key=value`` lines in a fixed key order."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    lines = [
        f"seed={summary.seed}",
        f"config_hash={summary.config_hash}",
        f"n_classes={summary.n_classes}",
        f"steps={summary.steps}",
    ]
    lines.extend(f"{key}={_fmt(value)}" for key, value in summary.final.items())
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
    logger.debug(f"Wrote summary to {path}")


def read_summary(path: str) -> Dict[str, str]:
    """
    Parse a summary file into an ordered mapping of raw strings.

    Raises:
        DataFormatError: If the file is missing or a line has no ``=``
    """
    if not os.path.exists(path):
        raise DataFormatError("summary file not found", path=path)
    values: Dict[str, str] = {}
    with open(path, "r") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            if "=" not in line:
                raise DataFormatError("expected key=value", path=path, line=line_no)
            key, value = line.split("=", 1)
            values[key] = value
    return values


def aggregate_runs(summaries: Sequence[RunSummary]) -> pd.DataFrame:
    """
    Mean and population standard deviation of every series column per step.

    Runs are ordered by seed first, so the result does not depend on the
    order the summaries arrive in.

    Returns:
        Frame with ``step`` and ``<column>_mean`` / ``<column>_std`` columns
    """
    if not summaries:
        raise InvalidInputError("nothing to aggregate")
    ordered = sorted(summaries, key=lambda s: s.seed)
    n_classes = ordered[0].n_classes
    columns = metrics_columns(n_classes)
    stacked = pd.concat([s.series[columns] for s in ordered], ignore_index=True)
    grouped = stacked.groupby("step", sort=True)
    mean = grouped.mean()
    std = grouped.std(ddof=0)
    result = pd.DataFrame({"step": mean.index.to_numpy()})
    for column in columns[1:]:
        result[f"{column}_mean"] = mean[column].to_numpy()
        result[f"{column}_std"] = std[column].to_numpy()
    return result


def write_aggregate_csv(aggregate: pd.DataFrame, path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    aggregate.to_csv(path, index=False, na_rep=NA, float_format="%.17g", lineterminator="\n")


def observed_coverage(series: pd.DataFrame) -> pd.DataFrame:
    return series[[c for c in series.columns if c.startswith("cvg_class_")]]


def first_step_in_band(series: pd.DataFrame, target: float, tol: float) -> Optional[int]:
    """
    First logged step at which every observed class coverage is within ``tol``
    of ``target``; None if that never happens.
    """
    coverage = observed_coverage(series)
    observed = coverage.notna()
    within = ((coverage - target).abs() <= tol) | ~observed
    hits = within.all(axis=1) & observed.any(axis=1)
    if not hits.any():
        return None
    return int(series.loc[hits.idxmax(), "step"])


def size_oscillation(series: pd.DataFrame, column: str = "set_size") -> float:
    """Population standard deviation of ``column`` over the last half of the rows."""
    values = series[column].dropna().to_numpy(dtype=float)
    if values.size == 0:
        return float("nan")
    tail = values[values.size // 2 :]
    return float(np.std(tail))
