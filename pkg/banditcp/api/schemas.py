"""API schemas (Pydantic models) for the bandit conformal API."""

from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field


class RunRequest(BaseModel):
    """API schema for starting a run; unset fields keep their defaults."""

    algorithm: Optional[str] = Field(None, description="alg1 or alg2")
    alpha: Optional[float] = Field(None, description="Non-coverage rate")
    eta1: Optional[float] = Field(None, description="Model learning rate")
    eta2: Optional[float] = Field(None, description="Threshold learning rate (alg1)")
    eta2_grid: Optional[List[float]] = Field(None, description="Expert learning rates (alg2)")
    score: Optional[str] = Field(None, description="softmax, aps or raps")
    lam: Optional[float] = Field(None, description="RAPS penalty lambda")
    kreg: Optional[int] = Field(None, description="RAPS rank offset")
    policy: Optional[str] = Field(None, description="uniform, softmax, bayes or label-oracle")
    floor: Optional[float] = Field(None, description="Policy probability floor")
    data: Optional[str] = Field(None, description="gm or file:PATH")
    gm_preset: Optional[str] = Field(None, description="Gaussian-mixture preset name")
    hidden: Optional[int] = Field(None, description="Hidden units, 0 for a linear model")
    T: Optional[int] = Field(None, description="Number of stream instances")
    batch: Optional[int] = Field(None, description="Batch size")
    seed: Optional[int] = Field(None, description="Random seed for reproducibility")
    log_every: Optional[int] = Field(None, description="Batches between metric rows")
    delta: Optional[float] = Field(None, description="Confidence level of the coverage bound")

    def overrides(self) -> Dict[str, Any]:
        """Set fields as configuration overrides."""
        values = self.model_dump() if hasattr(self, "model_dump") else self.dict()
        overrides = {key: value for key, value in values.items() if value is not None}
        if "lam" in overrides:
            overrides["lambda"] = overrides.pop("lam")
        return overrides


class RunInfo(BaseModel):
    """API schema for the status of a run."""

    run_id: str
    status: str
    seed: int
    config_hash: Optional[str] = None
    steps: Optional[int] = None
    error: Optional[str] = None


class RunSummaryData(BaseModel):
    """API schema for the final values of a run."""

    run_id: str
    seed: int
    config_hash: str
    values: Dict[str, Optional[Union[str, float]]]


class MetricsData(BaseModel):
    """API schema for the logged metrics series of a run."""

    run_id: str
    columns: List[str]
    rows: List[Dict[str, Optional[float]]]
