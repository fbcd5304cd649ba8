"""
Synthetic Snapshot Generators
AR(1) covariance recursion, Monte-Carlo trajectories, cubic-map and Dirac sequences
"""

from typing import List, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from wassreg.errors import DimensionMismatchError
from wassreg.linalg import is_psd, sqrt_spd, symmetrize
from .empirical import EmpiricalMeasure, empirical_pushforward, readonly, uniform_grid_1d
from .gaussian import GaussianMeasure


AR1_A0 = np.array([[-0.5, 2.0], [-1.0, 1.5]])
AR1_NOISE_SCALE = 0.4
CUBIC_COEFFICIENTS = (-0.8, 0.6, 0.7)


class Ar1Config(BaseModel):
    """Linear stochastic dynamics x_{k+1} = A0 x_k + w_k with w_k ~ N(0, Q)"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    a0: np.ndarray = Field(description="True dynamics matrix, shape (d, d)")
    noise_cov: np.ndarray = Field(description="Noise covariance Q, symmetric PSD")
    c1: np.ndarray = Field(description="Covariance of the first snapshot")
    steps: int = Field(ge=2, description="Number of snapshots m")

    @field_validator("a0", "noise_cov", "c1", mode="before")
    @classmethod
    def _coerce(cls, v):
        return readonly(np.atleast_2d(np.asarray(v, dtype=float)))

    @model_validator(mode="after")
    def _check(self) -> "Ar1Config":
        d = self.a0.shape[0]
        for name in ("a0", "noise_cov", "c1"):
            if getattr(self, name).shape != (d, d):
                raise DimensionMismatchError(f"{name} must have shape ({d}, {d})")
        if not is_psd(self.noise_cov):
            raise ValueError("noise_cov must be symmetric positive semidefinite")
        if not is_psd(self.c1):
            raise ValueError("c1 must be symmetric positive semidefinite")
        return self

    @property
    def dim(self) -> int:
        return int(self.a0.shape[0])

    @classmethod
    def planar_default(cls, steps: int = 6, noise: bool = True) -> "Ar1Config":
        """The planar AR(1) setup: A0, Q = (2/5)^2 I, C1 = I, m = 6"""
        q = AR1_NOISE_SCALE ** 2 * np.eye(2) if noise else np.zeros((2, 2))
        return cls(a0=AR1_A0, noise_cov=q, c1=np.eye(2), steps=steps)


def ar1_covariance_sequence(cfg: Ar1Config) -> List[GaussianMeasure]:
    """
    Exact zero-mean snapshot sequence C_{k+1} = A0 C_k A0^T + Q

    Returns:
        cfg.steps Gaussian measures, the first being N(0, c1)
    """
    covs = [np.array(cfg.c1)]
    for _ in range(cfg.steps - 1):
        covs.append(symmetrize(cfg.a0 @ covs[-1] @ cfg.a0.T + cfg.noise_cov))
    return [GaussianMeasure.centered(c) for c in covs]


def ar1_sample_trajectories(cfg: Ar1Config, n: int, seed: int) -> List[EmpiricalMeasure]:
    """
    Monte-Carlo alternative to the exact recursion

    Simulates n independent trajectories and keeps only the per-time point
    clouds, discarding sample correspondence across times.
    """
    if n < 1:
        raise ValueError(f"Trajectory count must be at least 1, got {n}")

    children = np.random.SeedSequence(seed).spawn(cfg.steps)
    rng0 = np.random.default_rng(children[0])
    x = rng0.standard_normal((n, cfg.dim)) @ sqrt_spd(cfg.c1)
    noise_root = sqrt_spd(cfg.noise_cov)

    snapshots = [EmpiricalMeasure.uniform(x)]
    for k in range(1, cfg.steps):
        rng = np.random.default_rng(children[k])
        x = x @ cfg.a0.T + rng.standard_normal((n, cfg.dim)) @ noise_root
        snapshots.append(EmpiricalMeasure.uniform(x))
    return snapshots


def cubic_map(x, coefficients=CUBIC_COEFFICIENTS) -> np.ndarray:
    """S(x) = c + b (1 - x) + a (1 - x)^3 with (a, b, c) = coefficients"""
    a, b, c = coefficients
    u = 1.0 - np.asarray(x, dtype=float)
    return c + b * u + a * u ** 3


def cubic_snapshots(
    n: int = 100,
    steps: int = 2,
    sampling: Literal["grid", "random"] = "grid",
    seed: int = 0,
    coefficients=CUBIC_COEFFICIENTS,
) -> List[EmpiricalMeasure]:
    """
    Iterates of the cubic map starting from the uniform law on [0, 1]

    Args:
        n: Points per snapshot
        steps: Number of snapshots (2 reproduces the single-pair experiment)
        sampling: "grid" for the midpoint grid, "random" for i.i.d. uniform draws
        seed: Seed for the random variant
        coefficients: Cubic coefficients for ((1-x)^3, (1-x), 1)
    """
    if steps < 2:
        raise ValueError(f"Need at least 2 snapshots, got {steps}")

    if sampling == "grid":
        first = uniform_grid_1d(n)
    elif sampling == "random":
        rng = np.random.default_rng(seed)
        first = EmpiricalMeasure.uniform(np.sort(rng.uniform(0.0, 1.0, size=n)))
    else:
        raise ValueError(f"Unknown sampling '{sampling}'. Available: grid, random")

    snapshots = [first]
    for _ in range(steps - 1):
        snapshots.append(empirical_pushforward(snapshots[-1], lambda p: cubic_map(p, coefficients)))
    return snapshots


def dirac_sequence(points) -> List[EmpiricalMeasure]:
    """One Dirac snapshot per trajectory state"""
    states = np.asarray(points, dtype=float)
    if states.ndim == 1:
        states = states.reshape(-1, 1)
    return [EmpiricalMeasure.dirac(x) for x in states]
