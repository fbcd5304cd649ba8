"""
Descent State Models
Step configuration and the per-iteration trace that flows out of every fit
"""

import math
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field

from wassreg.config import settings


class DescentConfig(BaseModel):
    """Gradient-descent settings"""

    step: float = Field(default_factory=lambda: settings.alpha, gt=0.0, description="Learning rate alpha")
    max_iters: int = Field(default_factory=lambda: settings.max_iters, ge=0, description="Iteration cap")
    grad_tol: float = Field(default_factory=lambda: settings.grad_tol, ge=0.0,
                            description="Stop when the gradient norm falls below this")
    backtracking: bool = Field(default_factory=lambda: settings.backtracking,
                               description="Armijo backtracking line search")
    shrink: float = Field(default_factory=lambda: settings.shrink, gt=0.0, lt=1.0,
                          description="Step shrink factor for backtracking")
    armijo: float = Field(default_factory=lambda: settings.armijo, gt=0.0, lt=1.0,
                          description="Sufficient-decrease constant")
    max_backtracks: int = Field(default=60, ge=1, description="Shrinks tried before giving up")
    reduction: Literal["mean", "sum"] = Field(
        default_factory=lambda: settings.reduction,
        description="Scale the step and stop test by 1/(m-1) (mean) or not at all (sum)"
    )
    workers: int = Field(default_factory=lambda: settings.workers, ge=1,
                         description="Threads for per-pair transport solves")
    record_plans: bool = Field(default=False, description="Keep optimal plan assignments per iteration")
    seed: int = Field(default_factory=lambda: settings.seed, ge=0, description="Seed recorded with the run")

    class Config:
        json_schema_extra = {
            "example": {
                "step": 0.1,
                "max_iters": 500,
                "grad_tol": 1e-6,
                "backtracking": False,
                "reduction": "mean",
            }
        }


class TraceRecord(BaseModel):
    """One recorded iterate"""

    iteration: int = Field(ge=0, description="Iteration index n")
    objective: float = Field(description="Summed objective F over all snapshot pairs")
    grad_norm: float = Field(ge=0.0, description="Frobenius/Euclidean norm of grad F")
    params: List[float] = Field(description="Parameter snapshot, flattened row-major")
    step: Optional[float] = Field(default=None, description="Step length taken from this iterate")
    plans: Optional[List[List[int]]] = Field(
        default=None,
        description="Per pair, the target index receiving most mass from each source point"
    )


class FitTrace(BaseModel):
    """Convergence record of one fit"""

    records: List[TraceRecord] = Field(default_factory=list)
    status: Literal["running", "converged", "max-iters", "error"] = Field(default="running")
    message: Optional[str] = Field(default=None, description="Reason for an error status")

    def append(self, record: TraceRecord) -> None:
        if self.records and record.iteration <= self.records[-1].iteration:
            raise ValueError(
                f"Iterations must increase: {record.iteration} after {self.records[-1].iteration}"
            )
        if not math.isfinite(record.objective):
            raise ValueError(f"Objective must be finite, got {record.objective}")
        self.records.append(record)

    def finish(self, status: str, message: Optional[str] = None) -> None:
        self.status = status
        self.message = message

    @property
    def final(self) -> Optional[TraceRecord]:
        return self.records[-1] if self.records else None

    @property
    def n_iterations(self) -> int:
        return len(self.records)

    def objectives(self) -> np.ndarray:
        return np.array([r.objective for r in self.records])

    def grad_norms(self) -> np.ndarray:
        return np.array([r.grad_norm for r in self.records])

    def params_at(self, iteration: int) -> np.ndarray:
        for r in self.records:
            if r.iteration == iteration:
                return np.array(r.params)
        raise KeyError(f"No record for iteration {iteration}")
