"""
Run Storage
JSON measure files, CSV tables, and atomic writes for run outputs
"""

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, Union

import numpy as np

from wassreg.errors import InputParseError, WassregError
from wassreg.measures import EmpiricalMeasure, GaussianMeasure
from wassreg.transport import Coupling


Measure = Union[GaussianMeasure, EmpiricalMeasure]


def fmt(value: float) -> str:
    """Shortest text that round-trips the float"""
    return repr(float(value))


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """Write to a temp file in the same directory, then rename over the target"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path: Union[str, Path], data: Any) -> Path:
    return atomic_write_text(path, json.dumps(data, indent=2, default=str) + "\n")


def read_text(path: Union[str, Path]) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputParseError(f"Cannot read file: {e.strerror}", str(path)) from e


def parse_json(text: str, path: Union[str, Path] = "<memory>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputParseError(f"Invalid JSON: {e.msg}", str(path), e.lineno) from e


def read_json(path: Union[str, Path]) -> Any:
    """
    Load a JSON document

    Raises:
        InputParseError: With the offending line for syntax errors
    """
    return parse_json(read_text(path), path)


# ----------------------------------------------------------------------------
# Measures
# ----------------------------------------------------------------------------

def gaussian_to_dict(g: GaussianMeasure) -> dict:
    return {"dim": g.dim, "mean": g.mean.tolist(), "cov": g.cov.tolist()}


def empirical_to_dict(e: EmpiricalMeasure) -> dict:
    return {"dim": e.dim, "points": e.points.tolist(), "weights": e.weights.tolist()}


def _where(index: Optional[int], what: str) -> str:
    return f"Snapshot {index}: {what}" if index is not None else what


def _require(entry: dict, keys: Sequence[str], path: str, what: str,
             line: Optional[int] = None, index: Optional[int] = None) -> None:
    if not isinstance(entry, dict):
        raise InputParseError(f"{_where(index, what)} must be a JSON object", path, line)
    missing = [k for k in keys if k not in entry]
    if missing:
        raise InputParseError(f"{_where(index, what)} is missing {', '.join(missing)}", path, line)


def gaussian_from_dict(entry: dict, path: str = "<memory>",
                       line: Optional[int] = None, index: Optional[int] = None) -> GaussianMeasure:
    _require(entry, ("dim", "mean", "cov"), path, "Gaussian measure", line, index)
    try:
        g = GaussianMeasure(mean=entry["mean"], cov=entry["cov"])
    except (WassregError, ValueError, TypeError) as e:
        raise InputParseError(f"{_where(index, 'Invalid Gaussian measure')}: {e}", path, line) from e
    if g.dim != entry["dim"]:
        raise InputParseError(_where(index, f"Declared dim {entry['dim']} but data has dim {g.dim}"), path, line)
    return g


def empirical_from_dict(entry: dict, path: str = "<memory>",
                        line: Optional[int] = None, index: Optional[int] = None) -> EmpiricalMeasure:
    _require(entry, ("dim", "points"), path, "Empirical measure", line, index)
    try:
        points = np.asarray(entry["points"], dtype=float)
        if points.ndim == 1 and entry["dim"] != 1:
            points = points.reshape(-1, entry["dim"])
        e = EmpiricalMeasure(points=points, weights=entry.get("weights"))
    except (WassregError, ValueError, TypeError) as e_:
        raise InputParseError(f"{_where(index, 'Invalid empirical measure')}: {e_}", path, line) from e_
    if e.dim != entry["dim"]:
        raise InputParseError(_where(index, f"Declared dim {entry['dim']} but points have dim {e.dim}"), path, line)
    return e


def measure_from_dict(entry: dict, path: str = "<memory>",
                      line: Optional[int] = None, index: Optional[int] = None) -> Measure:
    if isinstance(entry, dict) and "cov" in entry:
        return gaussian_from_dict(entry, path, line, index)
    return empirical_from_dict(entry, path, line, index)


def measure_to_dict(m: Measure) -> dict:
    return gaussian_to_dict(m) if isinstance(m, GaussianMeasure) else empirical_to_dict(m)


def save_snapshots(path: Union[str, Path], snapshots: Iterable[Measure]) -> Path:
    """{"snapshots": [...]} with one entry per measure"""
    return write_json(path, {"snapshots": [measure_to_dict(m) for m in snapshots]})


def entry_lines(text: str) -> List[int]:
    """
    1-based line where each measure object opens

    Objects directly inside the top-level "snapshots" list count; a file
    without that key is one measure starting at its first brace.
    """
    key = text.find('"snapshots"')
    if key < 0:
        brace = text.find("{")
        return [text.count("\n", 0, brace) + 1] if brace >= 0 else []

    start = text.find("[", key)
    if start < 0:
        return []

    lines: List[int] = []
    depth = 0
    in_string = escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
        elif ch == '"':
            in_string = True
        elif ch in "[{":
            depth += 1
            if depth == 2 and ch == "{":
                lines.append(text.count("\n", 0, i) + 1)
        elif ch in "]}":
            depth -= 1
            if depth == 0:
                break
    return lines


def load_snapshots(path: Union[str, Path]) -> List[Measure]:
    """
    Snapshots from a file; a single measure object counts as one snapshot

    Raises:
        InputParseError: On malformed files or mixed measure kinds, with the
            line where the offending entry starts
    """
    text = read_text(path)
    data = parse_json(text, path)
    entries = data["snapshots"] if isinstance(data, dict) and "snapshots" in data else [data]
    if not isinstance(entries, list) or not entries:
        key = text.find('"snapshots"')
        line = text.count("\n", 0, max(key, 0)) + 1
        raise InputParseError("'snapshots' must be a non-empty list", str(path), line)

    lines = entry_lines(text)
    if len(lines) != len(entries):
        lines = [None] * len(entries)
    measures = [
        measure_from_dict(entry, str(path), line, i + 1)
        for i, (entry, line) in enumerate(zip(entries, lines))
    ]
    for i, m in enumerate(measures):
        if type(m) is not type(measures[0]):
            raise InputParseError(f"Snapshot {i + 1}: snapshots mix Gaussian and empirical measures",
                                  str(path), lines[i])
        if m.dim != measures[0].dim:
            raise InputParseError(f"Snapshot {i + 1}: dimension {m.dim} differs from {measures[0].dim}",
                                  str(path), lines[i])
    return measures


def load_measure(path: Union[str, Path]) -> Measure:
    measures = load_snapshots(path)
    if len(measures) != 1:
        raise InputParseError(f"Expected a single measure, found {len(measures)}", str(path))
    return measures[0]


def load_trajectory(path: Union[str, Path]) -> np.ndarray:
    """{"dim": d, "states": [[...], ...]} or a bare list of states"""
    data = read_json(path)
    states = data.get("states") if isinstance(data, dict) else data
    if states is None:
        raise InputParseError("Trajectory file needs a 'states' list", str(path))
    try:
        x = np.asarray(states, dtype=float)
    except (ValueError, TypeError) as e:
        raise InputParseError(f"States are not numeric: {e}", str(path)) from e
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if x.ndim != 2 or x.shape[0] < 2:
        raise InputParseError(f"Need at least 2 states of equal length, got shape {x.shape}", str(path))
    if isinstance(data, dict) and "dim" in data and data["dim"] != x.shape[1]:
        raise InputParseError(f"Declared dim {data['dim']} but states have dim {x.shape[1]}", str(path))
    return x


# ----------------------------------------------------------------------------
# CSV tables
# ----------------------------------------------------------------------------

def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return atomic_write_text(path, buffer.getvalue())


def write_matrix_csv(path: Union[str, Path], matrix) -> Path:
    """Dense matrix, one row per line, no header"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    for row in np.atleast_2d(np.asarray(matrix, dtype=float)):
        writer.writerow([fmt(v) for v in row])
    return atomic_write_text(path, buffer.getvalue())


def write_coupling_csv(path: Union[str, Path], coupling: Coupling) -> Path:
    """Sparse triplets row,col,mass"""
    return write_csv(path, ("row", "col", "mass"), coupling.support())
