"""FastAPI app serving online bandit conformal runs."""

import logging
import threading
import uuid
from typing import Dict, List, Optional

from fastapi import FastAPI

from banditcp.simulation.replication import RunHandle

logger = logging.getLogger(__name__)

app = FastAPI(
    title="Bandit Conformal API",
    description="Run online class-specific conformal prediction from bandit feedback",
    version="0.1.0",
)


class RunManager:
    """In-memory registry of finished runs, shared by the request threads."""

    def __init__(self):
        self.runs: Dict[str, RunHandle] = {}
        self._lock = threading.Lock()

    def register_run(self, handle: RunHandle) -> str:
        run_id = f"run_{uuid.uuid4().hex[:8]}"
        handle.run_id = run_id
        with self._lock:
            self.runs[run_id] = handle
        return run_id

    def get_run(self, run_id: str) -> Optional[RunHandle]:
        return self.runs.get(run_id)

    def delete_run(self, run_id: str) -> bool:
        with self._lock:
            return self.runs.pop(run_id, None) is not None

    def list_runs(self) -> List[str]:
        with self._lock:
            return sorted(self.runs)


_run_manager = RunManager()


def get_run_manager() -> RunManager:
    return _run_manager


@app.get("/")
async def root():
    return {"name": app.title, "version": app.version, "runs_url": "/api/runs"}


from banditcp.api.routes.runs import router as runs_router

app.include_router(runs_router, prefix="/api")
