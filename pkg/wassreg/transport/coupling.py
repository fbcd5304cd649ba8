"""
Coupling Model
Joint probability matrix between two discrete marginals
"""

from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.spatial.distance import cdist

from wassreg.config import settings
from wassreg.errors import DimensionMismatchError
from wassreg.measures.empirical import readonly


def pairwise_sq_dists(x, y) -> np.ndarray:
    """Squared Euclidean ground cost matrix, shape (n0, n1)"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if y.ndim == 1:
        y = y.reshape(-1, 1)
    if x.shape[1] != y.shape[1]:
        raise DimensionMismatchError(f"Point dimensions differ: {x.shape[1]} vs {y.shape[1]}")
    return cdist(x, y, metric="sqeuclidean")


class Coupling(BaseModel):
    """Transport plan with its marginals and squared-Euclidean cost"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    plan: np.ndarray = Field(description="Nonnegative joint mass, shape (n0, n1)")
    source_weights: np.ndarray = Field(description="Row marginal, shape (n0,)")
    target_weights: np.ndarray = Field(description="Column marginal, shape (n1,)")
    cost: float = Field(description="sum_jk plan_jk |x_j - y_k|^2")

    @field_validator("plan", mode="before")
    @classmethod
    def _coerce_plan(cls, v):
        return readonly(np.atleast_2d(np.asarray(v, dtype=float)))

    @field_validator("source_weights", "target_weights", mode="before")
    @classmethod
    def _coerce_weights(cls, v):
        return readonly(np.atleast_1d(np.asarray(v, dtype=float)).ravel())

    @model_validator(mode="after")
    def _check_marginals(self) -> "Coupling":
        n0, n1 = self.plan.shape
        if self.source_weights.shape != (n0,) or self.target_weights.shape != (n1,):
            raise DimensionMismatchError(
                f"Plan shape {self.plan.shape} does not match marginals "
                f"{self.source_weights.shape}, {self.target_weights.shape}"
            )
        if np.any(self.plan < 0.0):
            raise ValueError("Plan entries must be nonnegative")

        tol = settings.marginal_tol
        row_err = float(np.max(np.abs(self.plan.sum(axis=1) - self.source_weights)))
        col_err = float(np.max(np.abs(self.plan.sum(axis=0) - self.target_weights)))
        if row_err > tol or col_err > tol:
            raise ValueError(f"Plan marginals off by {max(row_err, col_err):.3e}")
        return self

    @property
    def shape(self) -> Tuple[int, int]:
        return self.plan.shape

    def recompute_cost(self, x, y) -> float:
        """Inner product of the plan with the squared-distance matrix of x, y"""
        return float(np.sum(self.plan * pairwise_sq_dists(x, y)))

    def support(self) -> List[Tuple[int, int, float]]:
        """Sparse (row, col, mass) triplets in row-major order"""
        rows, cols = np.nonzero(self.plan)
        return [(int(r), int(c), float(self.plan[r, c])) for r, c in zip(rows, cols)]

    def assignment(self) -> np.ndarray:
        """Target index carrying the largest share of each source point"""
        return np.argmax(self.plan, axis=1)

    def barycentric_map(self, y) -> np.ndarray:
        """Conditional mean of the target given each source point"""
        y = np.asarray(y, dtype=float)
        if y.ndim == 1:
            y = y.reshape(-1, 1)
        row_mass = self.plan.sum(axis=1, keepdims=True)
        safe = np.where(row_mass > 0.0, row_mass, 1.0)
        return (self.plan @ y) / safe
