from pydantic import BaseModel, Field
from typing import Dict, Optional

class RunResult(BaseModel):
    run_index: int
    seed: int
    best_f: int = Field(..., ge=0)  # the empty solution is always feasible
    best_card: int = Field(..., ge=0)
    archive_size: int = Field(..., ge=1)
    seconds: float
    window_hit_rate: float = 0.0
    trace_path: Optional[str] = None
    fingerprint: str = ""

class SummaryRow(BaseModel):
    graph: str
    algo: str
    evaluator: str
    weights: str
    B: float
    alpha: float
    tsp: int
    tmax: int
    runs: int
    min: float
    max: float
    mean: float
    std: float
    mean_card: float
    mean_popsize: float
    seconds: float
    model: Dict = Field(default_factory=dict)
