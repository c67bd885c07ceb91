"""
Simulation module for bandit conformal runs.

Provides the online engine, its mutable run state, and the replication and
sweep harness that writes run outputs.
"""

from banditcp.simulation.engine import OnlineEngine, run_online
from banditcp.simulation.replication import (ReplicationResult, RunHandle, RunStatus,
                                             SweepResult, replicate, replication_seeds,
                                             run_single, sweep_eta2, write_run_outputs)
from banditcp.simulation.state import EventRecord, RandomStreams, RunState

__all__ = [
    "OnlineEngine",
    "run_online",
    "RunState",
    "RandomStreams",
    "EventRecord",
    "RunHandle",
    "RunStatus",
    "ReplicationResult",
    "SweepResult",
    "run_single",
    "replicate",
    "replication_seeds",
    "sweep_eta2",
    "write_run_outputs",
]
