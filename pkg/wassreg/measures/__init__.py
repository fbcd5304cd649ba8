"""
Probability Measures
Gaussian and empirical snapshots, pushforwards, and synthetic data
"""

from .empirical import EmpiricalMeasure, empirical_pushforward, uniform_grid_1d
from .gaussian import (
    GaussianMeasure,
    gaussian_pushforward_linear,
    gaussian_pushforward_affine,
    sample_gaussian,
    ellipse_polyline,
)
from .synthetic import (
    Ar1Config,
    ar1_covariance_sequence,
    ar1_sample_trajectories,
    cubic_map,
    cubic_snapshots,
    dirac_sequence,
    AR1_A0,
    CUBIC_COEFFICIENTS,
)

__all__ = [
    "EmpiricalMeasure",
    "empirical_pushforward",
    "uniform_grid_1d",
    "GaussianMeasure",
    "gaussian_pushforward_linear",
    "gaussian_pushforward_affine",
    "sample_gaussian",
    "ellipse_polyline",
    "Ar1Config",
    "ar1_covariance_sequence",
    "ar1_sample_trajectories",
    "cubic_map",
    "cubic_snapshots",
    "dirac_sequence",
    "AR1_A0",
    "CUBIC_COEFFICIENTS",
]
