"""
Gaussian Optimal Transport
Closed-form Bures-Wasserstein distance and Monge map
"""

from typing import Tuple

import numpy as np

from wassreg.config import get_logger, settings
from wassreg.errors import DimensionMismatchError
from wassreg.linalg import inv_sqrt_spd, sqrt_spd, symmetrize
from wassreg.measures import GaussianMeasure


logger = get_logger(__name__)


def _check_dims(g0: GaussianMeasure, g1: GaussianMeasure) -> None:
    if g0.dim != g1.dim:
        raise DimensionMismatchError(f"Gaussian dimensions differ: {g0.dim} vs {g1.dim}")


def bures_cross_term(c0, c1) -> float:
    """tr((C1^{1/2} C0 C1^{1/2})^{1/2})"""
    s1 = sqrt_spd(c1)
    return float(np.trace(sqrt_spd(symmetrize(s1 @ c0 @ s1))))


def w2_squared_gaussian(g0: GaussianMeasure, g1: GaussianMeasure) -> float:
    """|m0 - m1|^2 + tr(C0 + C1 - 2 (C1^{1/2} C0 C1^{1/2})^{1/2}), clamped at zero"""
    _check_dims(g0, g1)
    shift = float(np.sum((g0.mean - g1.mean) ** 2))
    value = shift + float(np.trace(g0.cov) + np.trace(g1.cov)) - 2.0 * bures_cross_term(g0.cov, g1.cov)
    if value < -settings.trace_clamp_tol:
        logger.warning("Squared Gaussian W2 came out negative (%.3e); clamping to zero", value)
    return max(value, 0.0)


def w2_gaussian(g0: GaussianMeasure, g1: GaussianMeasure) -> float:
    """Closed-form Wasserstein-2 distance between two Gaussians"""
    return float(np.sqrt(w2_squared_gaussian(g0, g1)))


def monge_map_gaussian(g0: GaussianMeasure, g1: GaussianMeasure) -> Tuple[np.ndarray, np.ndarray]:
    """
    Optimal transport map x -> T x + b from g0 to g1

    T = C0^{-1/2} (C0^{1/2} C1 C0^{1/2})^{1/2} C0^{-1/2}, b = m1 - T m0

    Returns:
        (T, b) with T symmetric PSD

    Raises:
        NearSingularError: If C0 is numerically singular
    """
    _check_dims(g0, g1)
    c0_inv_half = inv_sqrt_spd(g0.cov)
    c0_half = sqrt_spd(g0.cov)
    middle = sqrt_spd(symmetrize(c0_half @ g1.cov @ c0_half))
    t = symmetrize(c0_inv_half @ middle @ c0_inv_half)
    return t, g1.mean - t @ g0.mean
