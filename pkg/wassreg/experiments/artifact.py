"""
Run Artifacts
Summary of one fit as written to artifact.json
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from wassreg.fitting import FitTrace
from wassreg.measures import EmpiricalMeasure, GaussianMeasure


class SnapshotSummary(BaseModel):
    """Per-snapshot description embedded in an artifact"""

    index: int = Field(ge=0)
    kind: str = Field(description="gaussian or empirical")
    dim: int = Field(ge=1)
    mean: List[float]
    cov: Optional[List[List[float]]] = Field(default=None, description="Gaussian covariance")
    points: Optional[List[List[float]]] = Field(default=None, description="Empirical support")

    @classmethod
    def of(cls, index: int, m) -> "SnapshotSummary":
        if isinstance(m, GaussianMeasure):
            return cls(index=index, kind="gaussian", dim=m.dim, mean=m.mean.tolist(), cov=m.cov.tolist())
        if isinstance(m, EmpiricalMeasure):
            return cls(index=index, kind="empirical", dim=m.dim, mean=m.mean().tolist(), points=m.points.tolist())
        raise TypeError(f"Unsupported measure type {type(m).__name__}")


class RunArtifact(BaseModel):
    """Everything a run produced, with the config needed to reproduce it"""

    command: str = Field(description="fit-gaussian or fit-empirical")
    config: Dict[str, Any] = Field(description="Fully resolved ExperimentConfig")
    status: str = Field(description="Terminal FitTrace status")
    message: Optional[str] = Field(default=None)
    params: List[float] = Field(description="Fitted parameters, row-major")
    initial_params: List[float] = Field(description="Starting parameters")
    final_objective: Optional[float] = Field(default=None)
    n_records: int = Field(ge=0, description="Rows in trace.csv")
    snapshots: List[SnapshotSummary] = Field(default_factory=list)
    files: List[str] = Field(default_factory=list, description="Output files relative to the run directory")
    started_at: str = Field(description="ISO timestamp")
    wall_clock_seconds: float = Field(ge=0.0)

    class Config:
        json_schema_extra = {
            "example": {
                "command": "fit-gaussian",
                "status": "converged",
                "params": [-0.49, 2.0, -1.03, 1.52],
                "final_objective": 0.026,
                "n_records": 120,
                "files": ["config.json", "trace.csv", "ellipses.csv", "artifact.json"],
            }
        }

    @classmethod
    def from_trace(cls, command: str, config: Dict[str, Any], trace: FitTrace, params, initial_params,
                   snapshots, files: List[str], started_at: str, elapsed: float) -> "RunArtifact":
        final = trace.final
        return cls(
            command=command,
            config=config,
            status=trace.status,
            message=trace.message,
            params=[float(v) for v in params],
            initial_params=[float(v) for v in initial_params],
            final_objective=final.objective if final is not None else None,
            n_records=trace.n_iterations,
            snapshots=[SnapshotSummary.of(i, m) for i, m in enumerate(snapshots)],
            files=files,
            started_at=started_at,
            wall_clock_seconds=elapsed,
        )

    @property
    def failed(self) -> bool:
        return self.status == "error"
