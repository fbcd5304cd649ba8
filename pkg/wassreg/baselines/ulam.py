"""
Ulam Box Discretization
Transfer-operator matrix from sampled images of uniform test points
"""

from typing import Callable, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from wassreg.config import get_logger
from wassreg.errors import DimensionMismatchError, ModelBlowupError
from wassreg.measures.empirical import readonly


logger = get_logger(__name__)

ROW_SUM_TOL = 1e-12


class UlamGrid(BaseModel):
    """Axis-aligned box partition of a rectangle"""

    model_config = ConfigDict(frozen=True)

    bounds: List[Tuple[float, float]] = Field(description="(low, high) per axis")
    counts: List[int] = Field(description="Boxes per axis")

    @field_validator("counts")
    @classmethod
    def _positive_counts(cls, v: List[int]) -> List[int]:
        if any(c < 1 for c in v):
            raise ValueError(f"Box counts must be >= 1, got {v}")
        return v

    @model_validator(mode="after")
    def _check(self) -> "UlamGrid":
        if len(self.bounds) != len(self.counts) or not self.bounds:
            raise DimensionMismatchError(
                f"Need one (low, high) pair per axis: {len(self.bounds)} bounds, {len(self.counts)} counts"
            )
        for low, high in self.bounds:
            if not high > low:
                raise ValueError(f"Axis bounds must satisfy low < high, got ({low}, {high})")
        return self

    @classmethod
    def interval(cls, low: float, high: float, n: int) -> "UlamGrid":
        return cls(bounds=[(low, high)], counts=[n])

    @property
    def dim(self) -> int:
        return len(self.counts)

    @property
    def n_boxes(self) -> int:
        return int(np.prod(self.counts))

    @property
    def widths(self) -> np.ndarray:
        return np.array([(h - l) / c for (l, h), c in zip(self.bounds, self.counts)])

    def _lows(self) -> np.ndarray:
        return np.array([l for l, _ in self.bounds])

    def box_multi_index(self, box: int) -> Tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(box, self.counts))

    def box_bounds(self, box: int) -> Tuple[np.ndarray, np.ndarray]:
        """Lower and upper corner of box `box` (row-major numbering)"""
        idx = np.array(self.box_multi_index(box))
        low = self._lows() + idx * self.widths
        return low, low + self.widths

    def box_index(self, points) -> np.ndarray:
        """
        Flat box index for every point, -1 outside the region

        Boxes are half-open [low, high) except the last box per axis, which
        also holds its upper edge.
        """
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, self.dim)
        if pts.shape[1] != self.dim:
            raise DimensionMismatchError(f"Grid has dimension {self.dim}, points have {pts.shape[1]}")

        counts = np.array(self.counts)
        highs = np.array([h for _, h in self.bounds])
        cells = np.floor((pts - self._lows()) / self.widths).astype(np.int64)
        cells = np.where((pts <= highs) & (cells >= counts), counts - 1, cells)
        inside = np.all((cells >= 0) & (cells < counts), axis=1) & np.all(np.isfinite(pts), axis=1)

        out = np.full(pts.shape[0], -1, dtype=np.int64)
        if np.any(inside):
            out[inside] = np.ravel_multi_index(tuple(cells[inside].T), self.counts)
        return out


class UlamMatrix(BaseModel):
    """Sub-stochastic matrix p_ij plus the mass of each box mapped off the grid"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    p: np.ndarray = Field(description="Transition fractions, shape (n, n)")
    k: int = Field(ge=1, description="Test points per box")
    escape: np.ndarray = Field(description="Mass leaving the grid per row, shape (n,)")

    @field_validator("p", "escape", mode="before")
    @classmethod
    def _coerce(cls, v):
        return readonly(np.asarray(v, dtype=float))

    @model_validator(mode="after")
    def _check(self) -> "UlamMatrix":
        n = self.p.shape[0]
        if self.p.shape != (n, n) or self.escape.shape != (n,):
            raise DimensionMismatchError(f"Inconsistent shapes {self.p.shape} and {self.escape.shape}")
        if np.any(self.p < 0.0) or np.any(self.escape < 0.0):
            raise ValueError("Ulam entries must be nonnegative")
        worst = float(np.max(np.abs(self.p.sum(axis=1) + self.escape - 1.0)))
        if worst > ROW_SUM_TOL:
            raise ValueError(f"Row sums plus escape deviate from 1 by {worst:.3e}")
        return self

    @property
    def n(self) -> int:
        return int(self.p.shape[0])

    def apply(self, density) -> np.ndarray:
        """One step of a box histogram (row vector of box masses); escaped mass is dropped"""
        density = np.asarray(density, dtype=float).ravel()
        if density.shape != (self.n,):
            raise DimensionMismatchError(f"Density needs {self.n} entries, got {density.shape[0]}")
        return density @ self.p


def ulam_matrix(s: Callable[[np.ndarray], np.ndarray], grid: UlamGrid, k: int, seed: int = 0) -> UlamMatrix:
    """
    p_ij = (1/k) sum_l 1_{B_j}(S(x_l^i)) with x_l^i uniform in box i

    Args:
        s: Vectorized map from (k, d) points to (k, d) images
        grid: Box partition
        k: Test points per box
        seed: Master seed; box i draws from the i-th spawned child

    Returns:
        UlamMatrix with escape mass for images outside the grid
    """
    if k < 1:
        raise ValueError(f"Need at least one test point per box, got k={k}")

    n = grid.n_boxes
    p = np.zeros((n, n))
    escape = np.zeros(n)
    children = np.random.SeedSequence(seed).spawn(n)

    for i in range(n):
        low, high = grid.box_bounds(i)
        rng = np.random.default_rng(children[i])
        points = rng.uniform(low, high, size=(k, grid.dim))
        images = np.asarray(s(points), dtype=float).reshape(k, grid.dim)
        if not np.all(np.isfinite(images)):
            raise ModelBlowupError(f"Map produced non-finite images in box {i}")

        targets = grid.box_index(images)
        hits = np.bincount(targets[targets >= 0], minlength=n)
        p[i] = hits / k
        escape[i] = np.count_nonzero(targets < 0) / k

    if np.any(escape > 0.0):
        logger.info("Ulam matrix: %d of %d boxes lose mass off the grid", int(np.count_nonzero(escape)), n)
    return UlamMatrix(p=p, k=k, escape=escape)


def box_histogram(grid: UlamGrid, points, weights: Sequence[float] = None) -> np.ndarray:
    """Mass of a weighted point cloud per box (points off the grid are ignored)"""
    idx = grid.box_index(points)
    w = np.full(idx.shape[0], 1.0 / idx.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    keep = idx >= 0
    return np.bincount(idx[keep], weights=w[keep], minlength=grid.n_boxes)
