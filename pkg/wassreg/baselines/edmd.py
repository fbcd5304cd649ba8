"""
Least-Squares Koopman Baselines
Extended DMD on a dictionary of observables and plain state-space DMD
"""

from typing import Callable, List, Sequence

import numpy as np
from scipy import linalg

from wassreg.config import get_logger
from wassreg.errors import DimensionMismatchError


logger = get_logger(__name__)

Observable = Callable[[np.ndarray], np.ndarray]


def _as_trajectory(trajectory) -> np.ndarray:
    x = np.asarray(trajectory, dtype=float)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if x.ndim != 2:
        raise DimensionMismatchError(f"Trajectory must be (m, d), got shape {x.shape}")
    if x.shape[0] < 2:
        raise ValueError(f"Need at least 2 states, got {x.shape[0]}")
    return x


def _solve_transition(phi1: np.ndarray, phi2: np.ndarray, label: str) -> np.ndarray:
    """Minimum-norm K with phi2 ~ K phi1 (columns are time samples)"""
    # lstsq solves phi1^T K^T = phi2^T
    kt, _, rank, _ = linalg.lstsq(phi1.T, phi2.T)
    if rank < phi1.shape[0]:
        logger.warning("%s: rank-deficient data (rank %d of %d); returning minimum-norm solution",
                       label, rank, phi1.shape[0])
    else:
        logger.debug("%s: full-rank solve (rank %d)", label, rank)
    return kt.T


def dictionary_matrix(trajectory, dictionary: Sequence[Observable]) -> np.ndarray:
    """Phi with Phi[i, t] = psi_i(x_t), shape (k, m)"""
    x = _as_trajectory(trajectory)
    if len(dictionary) < 1:
        raise ValueError("Dictionary needs at least one observable")
    rows = []
    for psi in dictionary:
        values = np.asarray(psi(x), dtype=float).reshape(-1)
        if values.shape != (x.shape[0],):
            raise DimensionMismatchError(f"Observable returned {values.shape[0]} values for {x.shape[0]} states")
        rows.append(values)
    return np.vstack(rows)


def edmd_fit(trajectory, dictionary: Sequence[Observable]) -> np.ndarray:
    """
    Extended DMD: K minimizing ||Phi_[2,m] - K Phi_[1,m-1]||_F

    Args:
        trajectory: States x_1..x_m, shape (m, d)
        dictionary: Observables, each mapping (m, d) states to (m,) values

    Returns:
        k x k matrix K
    """
    phi = dictionary_matrix(trajectory, dictionary)
    return _solve_transition(phi[:, :-1], phi[:, 1:], "edmd")


def dmd_least_squares(trajectory) -> np.ndarray:
    """A minimizing sum_i ||A x_i - x_{i+1}||^2, minimum-norm when underdetermined"""
    x = _as_trajectory(trajectory).T
    return _solve_transition(x[:, :-1], x[:, 1:], "dmd")


def coordinate_dictionary(dim: int) -> List[Observable]:
    """psi_j(x) = x_j for each coordinate"""
    return [lambda x, j=j: x[:, j] for j in range(dim)]


def monomial_dictionary(degree: int) -> List[Observable]:
    """1, x, x^2, ..., x^degree for one-dimensional states"""
    if degree < 0:
        raise ValueError(f"Degree must be >= 0, got {degree}")
    return [lambda x, p=p: x[:, 0] ** p for p in range(degree + 1)]
