"""Run endpoints for the bandit conformal API."""

import logging
import math
from typing import List

from fastapi import APIRouter, Depends, HTTPException

from banditcp.api.schemas import MetricsData, RunInfo, RunRequest, RunSummaryData
from banditcp.api.server import get_run_manager
from banditcp.config import parse_config
from banditcp.errors import BanditCPError, ConfigError
from banditcp.metrics.summary import metrics_columns
from banditcp.simulation.engine import run_online
from banditcp.simulation.replication import RunHandle, RunStatus

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/runs", tags=["runs"])


def _clean(value):
    """JSON-safe value: NaN and numpy scalars become None and Python numbers."""
    if value is None or isinstance(value, str):
        return value
    value = float(value)
    return None if math.isnan(value) else value


def _info(handle: RunHandle) -> RunInfo:
    summary = handle.summary
    return RunInfo(
        run_id=handle.run_id,
        status=handle.status.value,
        seed=handle.seed,
        config_hash=summary.config_hash if summary is not None else None,
        steps=summary.steps if summary is not None else None,
        error=handle.error,
    )


def _get_completed(run_id: str, run_manager) -> RunHandle:
    handle = run_manager.get_run(run_id)
    if not handle:
        raise HTTPException(status_code=404, detail=f"Run with ID {run_id} not found")
    if handle.summary is None:
        raise HTTPException(status_code=409, detail=f"Run {run_id} has no results")
    return handle


@router.post("", response_model=RunInfo)
def start_run(request: RunRequest, run_manager=Depends(get_run_manager)):
    """
    Run the online loop with the given overrides and keep the result.

    Declared without async so FastAPI runs it in its threadpool.

    Args:
        request: Configuration overrides
        run_manager: Run manager dependency

    Returns:
        Status of the finished run
    """
    try:
        run_config = parse_config(overrides=request.overrides())
    except ConfigError as e:
        raise HTTPException(status_code=422, detail=str(e))

    handle = RunHandle(run_id="", seed=run_config.seed)
    try:
        handle.summary = run_online(run_config)
        handle.status = RunStatus.COMPLETED
    except ConfigError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except BanditCPError as e:
        logger.error(f"Error running seed {run_config.seed}: {str(e)}")
        raise HTTPException(status_code=500, detail=f"Error running: {str(e)}")

    run_id = run_manager.register_run(handle)
    logger.info(f"Finished run with ID: {run_id}")
    return _info(handle)


@router.get("", response_model=List[str])
async def list_runs(run_manager=Depends(get_run_manager)):
    """List stored run IDs."""
    return run_manager.list_runs()


@router.get("/{run_id}", response_model=RunInfo)
async def get_run(run_id: str, run_manager=Depends(get_run_manager)):
    """Get the status of a run."""
    handle = run_manager.get_run(run_id)
    if not handle:
        raise HTTPException(status_code=404, detail=f"Run with ID {run_id} not found")
    return _info(handle)


@router.get("/{run_id}/summary", response_model=RunSummaryData)
async def get_run_summary(run_id: str, run_manager=Depends(get_run_manager)):
    """Get the final metrics and diagnostics of a run."""
    handle = _get_completed(run_id, run_manager)
    summary = handle.summary
    return RunSummaryData(
        run_id=run_id,
        seed=summary.seed,
        config_hash=summary.config_hash,
        values={key: _clean(value) for key, value in summary.final.items()},
    )


@router.get("/{run_id}/metrics", response_model=MetricsData)
async def get_run_metrics(run_id: str, run_manager=Depends(get_run_manager)):
    """Get the logged metrics series of a run."""
    handle = _get_completed(run_id, run_manager)
    summary = handle.summary
    columns = metrics_columns(summary.n_classes)
    rows = [
        {column: _clean(record[column]) for column in columns}
        for record in summary.series[columns].to_dict(orient="records")
    ]
    return MetricsData(run_id=run_id, columns=columns, rows=rows)


@router.delete("/{run_id}")
async def delete_run(run_id: str, run_manager=Depends(get_run_manager)):
    """Forget a stored run."""
    if not run_manager.delete_run(run_id):
        raise HTTPException(status_code=404, detail=f"Run with ID {run_id} not found")
    return {"deleted": run_id}
