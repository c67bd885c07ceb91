"""Seeded replications, learning-rate sweeps and run output files."""

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from banditcp.config import Algorithm, RunConfig
from banditcp.errors import BanditCPError, ConfigError, RunError
from banditcp.metrics.summary import (NA, RunSummary, aggregate_runs, first_step_in_band,
                                      size_oscillation, write_aggregate_csv,
                                      write_metrics_csv, write_summary)
from banditcp.model.snapshot import save_parameters
from banditcp.simulation.engine import run_online

logger = logging.getLogger(__name__)

BAND_TOLERANCE = 0.02
SWEEP_COLUMNS = [
    "eta2",
    "acum_cvg_min",
    "acum_cvg_max",
    "acum_size",
    "steps_to_band",
    "size_oscillation",
]


class RunStatus(str, Enum):
    """Lifecycle of one run."""

    PENDING = "pending"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class RunHandle:
    """Identity, seed, output location and outcome of one run."""

    run_id: str
    seed: int
    output_dir: Optional[str] = None
    status: RunStatus = RunStatus.PENDING
    error: Optional[str] = None
    summary: Optional[RunSummary] = None

    @property
    def paths(self) -> Dict[str, str]:
        if self.output_dir is None:
            return {}
        return {
            "metrics": os.path.join(self.output_dir, "metrics.csv"),
            "summary": os.path.join(self.output_dir, "summary.txt"),
        }


@dataclass
class ReplicationResult:
    """Handles of every replication plus the aggregate over completed ones."""

    handles: List[RunHandle]
    aggregate: Optional[pd.DataFrame] = None

    @property
    def summaries(self) -> List[RunSummary]:
        return [h.summary for h in self.handles if h.status == RunStatus.COMPLETED]

    @property
    def failures(self) -> List[RunHandle]:
        return [h for h in self.handles if h.status == RunStatus.FAILED]


@dataclass
class SweepResult:
    """One replicate set per learning rate plus the comparison table."""

    table: pd.DataFrame
    results: Dict[float, ReplicationResult] = field(default_factory=dict)


def write_run_outputs(summary: RunSummary, run_dir: str) -> None:
    """Write metrics, summary and the optional trace and parameter files."""
    os.makedirs(run_dir, exist_ok=True)
    write_metrics_csv(summary, os.path.join(run_dir, "metrics.csv"))
    write_summary(summary, os.path.join(run_dir, "summary.txt"))
    if summary.trace is not None:
        summary.trace.to_csv(
            os.path.join(run_dir, "trace.csv"),
            index=False,
            float_format="%.17g",
            lineterminator="\n",
        )
    if summary.params is not None:
        save_parameters(summary.params, os.path.join(run_dir, "params.txt"))
    logger.info(f"Wrote run outputs to {run_dir}")


def run_single(run_config: RunConfig, out_dir: Optional[str] = None) -> RunHandle:
    """
    Run once with ``run_config.seed`` and write ``<out>/run_seed<seed>/``.

    Raises:
        RunError: If the run fails
    """
    out_dir = run_config.out if out_dir is None else out_dir
    seed = run_config.seed
    summary = run_online(run_config, seed=seed)
    run_dir = os.path.join(out_dir, f"run_seed{seed}")
    write_run_outputs(summary, run_dir)
    return RunHandle(
        run_id=f"run_seed{seed}",
        seed=seed,
        output_dir=run_dir,
        status=RunStatus.COMPLETED,
        summary=summary,
    )


def _run_replication(
    run_config: RunConfig, index: int, seed: int, out_dir: Optional[str]
) -> RunHandle:
    run_id = f"rep{index}_seed{seed}"
    run_dir = os.path.join(out_dir, run_id) if out_dir is not None else None
    handle = RunHandle(run_id=run_id, seed=seed, output_dir=run_dir)
    try:
        summary = run_online(run_config, seed=seed)
    except ConfigError:
        raise
    except BanditCPError as e:
        logger.error(f"Replication {run_id} failed: {e}")
        handle.status = RunStatus.FAILED
        handle.error = str(e)
        return handle
    if run_dir is not None:
        write_run_outputs(summary, run_dir)
    handle.status = RunStatus.COMPLETED
    handle.summary = summary
    return handle


def replication_seeds(run_config: RunConfig) -> List[Tuple[int, int]]:
    """``(index, seed)`` pairs; replication ``i`` uses ``seed + i``."""
    return [(i, run_config.seed + i) for i in range(run_config.replications)]


def replicate(run_config: RunConfig, out_dir: Optional[str] = None) -> ReplicationResult:
    """
    Run independent seeded replications and aggregate them.

    With ``workers > 1`` the replications run in a process pool; handles are
    returned in replication order whatever order they finish in.

    Args:
        run_config: Resolved configuration
        out_dir: Output directory, ``run_config.out`` by default; pass an
            empty string to skip writing files

    Returns:
        Handles of every replication and the aggregate over completed ones

    Raises:
        ConfigError: If the configuration does not fit the data
        RunError: If every replication failed
    """
    out_dir = run_config.out if out_dir is None else out_dir
    out_dir = out_dir or None
    seeds = replication_seeds(run_config)
    logger.info(
        f"Running {len(seeds)} replications of {run_config.algorithm.value} "
        f"with {run_config.workers} worker(s)"
    )

    if run_config.workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=run_config.workers) as pool:
            futures = [
                pool.submit(_run_replication, run_config, index, seed, out_dir)
                for index, seed in seeds
            ]
            handles = [future.result() for future in futures]
    else:
        handles = []
        for index, seed in seeds:
            handles.append(_run_replication(run_config, index, seed, out_dir))
            logger.info(f"Replication {index + 1}/{len(seeds)} finished: {handles[-1].status.value}")

    result = ReplicationResult(handles=handles)
    if not result.summaries:
        raise RunError(0, f"all {len(handles)} replications failed")
    if result.failures:
        logger.warning(f"{len(result.failures)} of {len(handles)} replications failed")
    result.aggregate = aggregate_runs(result.summaries)
    if out_dir is not None:
        write_aggregate_csv(result.aggregate, os.path.join(out_dir, "aggregate.csv"))
    return result


def _sweep_row(eta2: float, result: ReplicationResult, target: float) -> Dict[str, float]:
    summaries = result.summaries
    finals = pd.DataFrame([s.final for s in summaries])
    band_steps = [first_step_in_band(s.series, target, BAND_TOLERANCE) for s in summaries]
    reached = [step for step in band_steps if step is not None]
    return {
        "eta2": eta2,
        "acum_cvg_min": float(finals["acum_cvg_min"].astype(float).mean()),
        "acum_cvg_max": float(finals["acum_cvg_max"].astype(float).mean()),
        "acum_size": float(finals["acum_size"].astype(float).mean()),
        # Mean over replications that reached the band, NaN if none did
        "steps_to_band": float(sum(reached) / len(reached)) if reached else float("nan"),
        "size_oscillation": float(
            sum(size_oscillation(s.series) for s in summaries) / len(summaries)
        ),
    }


def sweep_eta2(
    run_config: RunConfig, grid: Optional[Sequence[float]] = None, out_dir: Optional[str] = None
) -> SweepResult:
    """
    Run the full replicate pipeline once per ``eta2`` value.

    Args:
        run_config: Resolved alg1 configuration
        grid: Learning rates, ``run_config.eta2_grid`` by default
        out_dir: Output directory, ``run_config.out`` by default; pass an
            empty string to skip writing files

    Returns:
        The comparison table (one row per rate) and each replicate set

    Raises:
        ConfigError: If the algorithm is not alg1
    """
    if run_config.algorithm != Algorithm.ALG1:
        raise ConfigError("algorithm", "the eta2 sweep runs alg1 only")
    grid = list(run_config.eta2_grid if grid is None else grid)
    out_dir = run_config.out if out_dir is None else out_dir
    out_dir = out_dir or None

    results: Dict[float, ReplicationResult] = {}
    rows = []
    for eta2 in grid:
        point = run_config.replace(eta2=eta2)
        point_dir = os.path.join(out_dir, f"eta2_{eta2!r}") if out_dir is not None else ""
        logger.info(f"Sweep point eta2={eta2}")
        results[eta2] = replicate(point, out_dir=point_dir)
        rows.append(_sweep_row(eta2, results[eta2], 1.0 - run_config.alpha))

    table = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        table.to_csv(
            os.path.join(out_dir, "sweep.csv"),
            index=False,
            na_rep=NA,
            float_format="%.17g",
            lineterminator="\n",
        )
    return SweepResult(table=table, results=results)
