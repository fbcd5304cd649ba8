"""
Empirical Measures
Weighted point clouds, Dirac masses, and deterministic pushforward
"""

from typing import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from wassreg.errors import DimensionMismatchError, ModelBlowupError


WEIGHT_SUM_TOL = 1e-12

PointMap = Callable[[np.ndarray], np.ndarray]


def readonly(arr: np.ndarray) -> np.ndarray:
    """Copy of arr that refuses in-place writes"""
    out = np.array(arr, dtype=float, copy=True)
    out.setflags(write=False)
    return out


class EmpiricalMeasure(BaseModel):
    """Probability measure sum_k w_k delta_{x_k} on R^d"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray = Field(description="Support points, shape (n, d)")
    weights: np.ndarray = Field(description="Nonnegative weights summing to one, shape (n,)")

    @model_validator(mode="before")
    @classmethod
    def _default_weights(cls, data):
        if isinstance(data, dict) and data.get("weights") is None:
            pts = np.asarray(data.get("points"), dtype=float)
            n = pts.shape[0] if pts.ndim > 0 else 1
            if n == 0:
                raise DimensionMismatchError("Empirical measure needs at least one point")
            data = {**data, "weights": np.full(n, 1.0 / n)}
        return data

    @field_validator("points", mode="before")
    @classmethod
    def _coerce_points(cls, v):
        pts = np.asarray(v, dtype=float)
        if pts.ndim == 0:
            pts = pts.reshape(1, 1)
        elif pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        return readonly(pts)

    @field_validator("weights", mode="before")
    @classmethod
    def _coerce_weights(cls, v):
        return readonly(np.atleast_1d(np.asarray(v, dtype=float)).ravel())

    @model_validator(mode="after")
    def _check_invariants(self) -> "EmpiricalMeasure":
        n, d = self.points.shape
        if n < 1 or d < 1:
            raise DimensionMismatchError(f"Empirical measure needs n >= 1 and d >= 1, got shape {self.points.shape}")
        if self.weights.shape != (n,):
            raise DimensionMismatchError(f"Got {self.weights.shape[0]} weights for {n} points")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("Points must be finite")
        if np.any(self.weights < 0.0):
            raise ValueError("Weights must be nonnegative")
        total = float(np.sum(self.weights))
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"Weights must sum to 1, got {total!r}")
        return self

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.weights == self.weights[0]))

    @classmethod
    def uniform(cls, points) -> "EmpiricalMeasure":
        """Point cloud with weights 1/n"""
        return cls(points=points)

    @classmethod
    def dirac(cls, x) -> "EmpiricalMeasure":
        """Unit mass at x"""
        return cls(points=np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, -1), weights=[1.0])

    def mean(self) -> np.ndarray:
        return self.weights @ self.points

    def covariance(self) -> np.ndarray:
        centered = self.points - self.mean()
        cov = (centered * self.weights[:, None]).T @ centered
        return 0.5 * (cov + cov.T)

    def with_points(self, points: np.ndarray) -> "EmpiricalMeasure":
        """Same weights (bit-exact), new support"""
        return EmpiricalMeasure(points=points, weights=self.weights)


def empirical_pushforward(e: EmpiricalMeasure, fn: PointMap, vectorized: bool = True) -> EmpiricalMeasure:
    """
    Push a point cloud through a deterministic map

    Args:
        e: Source measure
        fn: Map applied to the (n, d) point array when vectorized,
            otherwise to each (d,) point in turn
        vectorized: Whether fn accepts the whole point array

    Returns:
        Measure with mapped points in the same order and identical weights

    Raises:
        ModelBlowupError: If the map returns non-finite values
        DimensionMismatchError: If the map changes the point count or dimension
    """
    if vectorized:
        images = np.asarray(fn(np.array(e.points)), dtype=float)
    else:
        images = np.array([np.atleast_1d(fn(p)) for p in e.points], dtype=float)

    images = images.reshape(e.n, -1) if images.size == e.n * e.dim else images
    if images.shape != e.points.shape:
        raise DimensionMismatchError(f"Map returned shape {images.shape}, expected {e.points.shape}")
    if not np.all(np.isfinite(images)):
        raise ModelBlowupError("Pushforward produced non-finite points")

    return e.with_points(images)


def uniform_grid_1d(n: int) -> EmpiricalMeasure:
    """Midpoint grid (k - 0.5) / n, k = 1..n, with weights 1/n"""
    if n < 1:
        raise ValueError(f"Grid size must be at least 1, got {n}")
    return EmpiricalMeasure.uniform((np.arange(1, n + 1) - 0.5) / n)
