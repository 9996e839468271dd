from pydantic import BaseModel, Field, field_validator, model_validator
from typing import List, Literal, Optional
import math
import os

MAX_SEED = (1 << 64) - 1

BOUND_PRESETS = ("half-n2", "n2")

def resolve_bound(spec: str, n: int) -> float:
    """half-n2 -> floor(n^2 / 2), n2 -> n^2, otherwise a positive real."""
    if spec == "half-n2":
        return float((n * n) // 2)
    if spec == "n2":
        return float(n * n)
    return float(spec)

class ExperimentConfig(BaseModel):
    graph: str
    weights: Literal["iid", "degree"] = "iid"
    evaluator: Literal["cheb", "chen", "sample"] = "sample"
    alpha: float = Field(0.1, gt=0, lt=1)
    bound: str = "half-n2"
    tsp: int = Field(250, ge=1)
    tmax: int = Field(1_500_000, ge=0)
    algo: Literal["gsemo", "sw", "asw"] = "asw"
    runs: int = Field(30, ge=1)
    seed: int = Field(0, ge=0, le=MAX_SEED)
    out: str = "results"
    trace: bool = False
    trace_all: bool = False
    workers: int = Field(1, ge=1)
    wsize_init: int = Field(1, ge=1)
    samples: Optional[str] = None
    record_time: bool = True
    resume: bool = False

    @field_validator("bound")
    @classmethod
    def validate_bound(cls, v):
        if v in BOUND_PRESETS:
            return v
        try:
            value = float(v)
        except ValueError:
            raise ValueError(f"bound must be one of {BOUND_PRESETS} or a positive real, got {v!r}")
        if not math.isfinite(value) or value <= 0:
            raise ValueError(f"bound must be positive, got {v!r}")
        return v

    @model_validator(mode="after")
    def validate_sampling_rank(self):
        if self.evaluator == "sample":
            k = math.ceil(self.tsp * self.alpha - 1e-9)
            if not 1 <= k <= self.tsp:
                raise ValueError(f"ceil(tsp * alpha) = {k} is outside [1, {self.tsp}]")
        return self

    @property
    def graph_name(self) -> str:
        return os.path.basename(self.graph).split(".")[0]

    def resolve_bound(self, n: int) -> float:
        return resolve_bound(self.bound, n)

    def cell_id(self) -> str:
        return (
            f"{self.graph_name}_{self.algo}_{self.evaluator}_{self.weights}"
            f"_B{self.bound}_a{self.alpha:g}_tsp{self.tsp}_t{self.tmax}"
        )

    def fingerprint(self) -> str:
        """Fields that determine a run's outcome, for resume matching."""
        return (
            f"{self.graph}|{self.weights}|{self.evaluator}|{self.alpha!r}|{self.bound}|{self.tsp}"
            f"|{self.tmax}|{self.algo}|{self.seed}|{self.wsize_init}|{self.samples or ''}"
        )

class RunRequest(BaseModel):
    graph: str = Field(..., min_length=1, max_length=200)
    weights: Literal["iid", "degree"] = "iid"
    evaluator: Literal["cheb", "chen", "sample"] = "sample"
    alpha: float = Field(0.1, gt=0, lt=1)
    bound: str = "half-n2"
    tsp: int = Field(250, ge=1)
    tmax: int = Field(10_000, ge=0)
    algo: Literal["gsemo", "sw", "asw"] = "asw"
    seed: int = Field(0, ge=0, le=MAX_SEED)
    wsize_init: int = Field(1, ge=1)

    @field_validator("graph")
    @classmethod
    def validate_graph(cls, v):
        if os.path.isabs(v) or ".." in v.replace("\\", "/").split("/"):
            raise ValueError("graph must be a path relative to the data directory")
        return v

class KruskalRequest(BaseModel):
    groups: List[List[float]] = Field(..., min_length=2)
