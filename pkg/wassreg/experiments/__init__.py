"""
Experiment Plumbing
Configs, run artifacts, measure files, and the experiment runner
"""

from .config import ExperimentConfig
from .artifact import RunArtifact, SnapshotSummary
from .storage import (
    atomic_write_text,
    write_json,
    read_json,
    load_snapshots,
    save_snapshots,
    load_measure,
    load_trajectory,
    write_csv,
    write_matrix_csv,
    write_coupling_csv,
)
from .runner import ExperimentRunner, write_trace_csv

__all__ = [
    "ExperimentConfig",
    "RunArtifact",
    "SnapshotSummary",
    "atomic_write_text",
    "write_json",
    "read_json",
    "load_snapshots",
    "save_snapshots",
    "load_measure",
    "load_trajectory",
    "write_csv",
    "write_matrix_csv",
    "write_coupling_csv",
    "ExperimentRunner",
    "write_trace_csv",
]
