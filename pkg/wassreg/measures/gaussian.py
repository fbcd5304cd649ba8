"""
Gaussian Measures
Mean/covariance carrier, linear pushforward, sampling, and contour polylines
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from wassreg.errors import DimensionMismatchError, NotPSDError, NotSymmetricError
from wassreg.linalg import sqrt_spd, symmetrize
from .empirical import EmpiricalMeasure, readonly


SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-10


class GaussianMeasure(BaseModel):
    """Normal distribution N(mean, cov) on R^d"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mean: np.ndarray = Field(description="Mean vector, shape (d,)")
    cov: np.ndarray = Field(description="Symmetric PSD covariance, shape (d, d)")

    @field_validator("mean", mode="before")
    @classmethod
    def _coerce_mean(cls, v):
        return readonly(np.atleast_1d(np.asarray(v, dtype=float)).ravel())

    @field_validator("cov", mode="before")
    @classmethod
    def _coerce_cov(cls, v):
        return readonly(np.atleast_2d(np.asarray(v, dtype=float)))

    @model_validator(mode="after")
    def _check_invariants(self) -> "GaussianMeasure":
        d = self.mean.shape[0]
        if d < 1:
            raise DimensionMismatchError("Gaussian dimension must be at least 1")
        if self.cov.shape != (d, d):
            raise DimensionMismatchError(f"Covariance shape {self.cov.shape} does not match mean dimension {d}")

        scale = 1.0 + float(np.max(np.abs(self.cov)))
        if float(np.max(np.abs(self.cov - self.cov.T))) > SYMMETRY_TOL * scale:
            raise NotSymmetricError("Covariance is not symmetric")

        lam = np.linalg.eigvalsh(self.cov)
        if lam[0] < -PSD_TOL * max(float(lam[-1]), 0.0):
            raise NotPSDError(
                f"Covariance is not positive semidefinite (smallest eigenvalue {lam[0]:.3e})",
                min_eigenvalue=float(lam[0]),
            )
        return self

    @property
    def dim(self) -> int:
        return int(self.mean.shape[0])

    @classmethod
    def standard(cls, d: int) -> "GaussianMeasure":
        """N(0, I_d)"""
        return cls(mean=np.zeros(d), cov=np.eye(d))

    @classmethod
    def centered(cls, cov) -> "GaussianMeasure":
        """N(0, cov)"""
        cov = np.atleast_2d(np.asarray(cov, dtype=float))
        return cls(mean=np.zeros(cov.shape[0]), cov=cov)

    @classmethod
    def from_empirical(cls, e: EmpiricalMeasure) -> "GaussianMeasure":
        """Moment-matched Gaussian of a weighted point cloud"""
        return cls(mean=e.mean(), cov=e.covariance())


def gaussian_pushforward_affine(g: GaussianMeasure, a, b=None) -> GaussianMeasure:
    """
    Pushforward of N(m, C) under x -> A x + b

    Returns:
        N(A m + b, A C A^T) with the covariance re-symmetrized
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape != (g.dim, g.dim):
        raise DimensionMismatchError(f"Map shape {a.shape} does not match measure dimension {g.dim}")

    mean = a @ g.mean
    if b is not None:
        b = np.atleast_1d(np.asarray(b, dtype=float))
        if b.shape != (g.dim,):
            raise DimensionMismatchError(f"Offset shape {b.shape} does not match measure dimension {g.dim}")
        mean = mean + b

    return GaussianMeasure(mean=mean, cov=symmetrize(a @ g.cov @ a.T))


def gaussian_pushforward_linear(g: GaussianMeasure, a) -> GaussianMeasure:
    """Pushforward of N(m, C) under x -> A x"""
    return gaussian_pushforward_affine(g, a)


def sample_gaussian(g: GaussianMeasure, n: int, seed: int) -> EmpiricalMeasure:
    """
    Draw n i.i.d. samples with uniform weights

    Standard normal draws are mapped through the symmetric covariance square
    root, so identical (g, n, seed) always give identical points.
    """
    if n < 1:
        raise ValueError(f"Sample count must be at least 1, got {n}")

    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, g.dim))
    root = sqrt_spd(g.cov)
    return EmpiricalMeasure.uniform(g.mean + z @ root)


def ellipse_polyline(g: GaussianMeasure, level: float = 1.0, n_points: int = 128,
                     closed: bool = False) -> np.ndarray:
    """
    Contour {m + level * C^{1/2} u : |u| = 1} of a planar Gaussian

    Args:
        g: Two-dimensional Gaussian
        level: Number of standard deviations
        n_points: Points along the contour
        closed: Repeat the first point at the end

    Returns:
        Array of shape (n_points, 2), or (n_points + 1, 2) when closed
    """
    if g.dim != 2:
        raise DimensionMismatchError(f"Ellipse contours need a 2-D Gaussian, got d={g.dim}")

    t = 2.0 * np.pi * np.arange(n_points) / n_points
    circle = np.column_stack([np.cos(t), np.sin(t)])
    pts = g.mean + level * circle @ sqrt_spd(g.cov)
    if closed:
        pts = np.vstack([pts, pts[:1]])
    return pts
