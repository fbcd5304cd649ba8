"""
Regression Objectives
Sum of squared W2 mismatches between pushed-forward and next snapshots, with gradients
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from wassreg.config import get_logger, settings
from wassreg.errors import DimensionMismatchError
from wassreg.linalg import inverse, sqrt_product, sqrt_spd, symmetrize
from wassreg.measures import EmpiricalMeasure, GaussianMeasure, empirical_pushforward
from wassreg.transport import Coupling, solve_discrete_ot
from .basis import BasisModel


logger = get_logger(__name__)

T = TypeVar("T")


def _map_pairs(fn: Callable[[int], T], n_pairs: int, workers: int = 1) -> List[T]:
    """Evaluate fn on every pair index; results come back in index order"""
    if workers <= 1 or n_pairs <= 1:
        return [fn(i) for i in range(n_pairs)]
    with ThreadPoolExecutor(max_workers=min(workers, n_pairs)) as pool:
        return list(pool.map(fn, range(n_pairs)))


def _clamp_cost(value: float) -> float:
    if value < 0.0:
        if value < -settings.cost_clamp_tol:
            logger.warning("Objective came out negative (%.3e); clamping to zero", value)
        return 0.0
    return value


# ----------------------------------------------------------------------------
# Gaussian snapshots
# ----------------------------------------------------------------------------

def as_covariances(snapshots) -> List[np.ndarray]:
    """Accept GaussianMeasures or raw matrices; return a list of d x d arrays"""
    covs = [np.atleast_2d(np.asarray(s.cov if isinstance(s, GaussianMeasure) else s, dtype=float))
            for s in snapshots]
    if len(covs) < 2:
        raise ValueError(f"Need at least 2 snapshots, got {len(covs)}")
    d = covs[0].shape[0]
    for c in covs:
        if c.shape != (d, d):
            raise DimensionMismatchError(f"Covariance shape {c.shape} does not match ({d}, {d})")
    return covs


def _check_map(a, d: int) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape != (d, d):
        raise DimensionMismatchError(f"Map shape {a.shape} does not match covariance dimension {d}")
    return a


def _gaussian_pair_cost(a: np.ndarray, c: np.ndarray, c_next: np.ndarray) -> float:
    aca = symmetrize(a @ c @ a.T)
    s = sqrt_spd(c_next)
    cross = sqrt_spd(symmetrize(s @ aca @ s))
    return float(np.trace(aca) + np.trace(c_next) - 2.0 * np.trace(cross))


def gaussian_cost(a, covs) -> float:
    """
    F(A) = sum_i tr(A C_i A^T + C_{i+1} - 2 (C_{i+1}^{1/2} A C_i A^T C_{i+1}^{1/2})^{1/2})

    Args:
        a: d x d map
        covs: m >= 2 covariance matrices (or zero-mean GaussianMeasures)

    Returns:
        Nonnegative objective value
    """
    covs = as_covariances(covs)
    a = _check_map(a, covs[0].shape[0])
    total = 0.0
    for i in range(len(covs) - 1):
        total += _gaussian_pair_cost(a, covs[i], covs[i + 1])
    return _clamp_cost(total)


def gaussian_gradient(a, covs) -> np.ndarray:
    """
    Gradient 2 { A sum_i C_i - (sum_i (C_{i+1} A C_i A^T)^{1/2}) A^{-T} }

    Raises:
        NearSingularError: If A is near-singular
    """
    covs = as_covariances(covs)
    a = _check_map(a, covs[0].shape[0])
    a_inv = inverse(a)

    source_sum = np.zeros_like(a)
    root_sum = np.zeros_like(a)
    for i in range(len(covs) - 1):
        source_sum += covs[i]
        root_sum += sqrt_product(covs[i + 1], symmetrize(a @ covs[i] @ a.T))

    return 2.0 * (a @ source_sum - root_sum @ a_inv.T)


def gaussian_objective(a, covs) -> Tuple[float, np.ndarray]:
    """Cost and gradient in one call"""
    covs = as_covariances(covs)
    return gaussian_cost(a, covs), gaussian_gradient(a, covs)


# ----------------------------------------------------------------------------
# Empirical snapshots
# ----------------------------------------------------------------------------

def _check_snapshots(snapshots: Sequence[EmpiricalMeasure], model: BasisModel) -> None:
    if len(snapshots) < 2:
        raise ValueError(f"Need at least 2 snapshots, got {len(snapshots)}")
    for s in snapshots:
        if s.dim != model.dim:
            raise DimensionMismatchError(f"Snapshot dimension {s.dim} does not match model dimension {model.dim}")


def pair_coupling(model: BasisModel, source: EmpiricalMeasure, target: EmpiricalMeasure) -> Tuple[EmpiricalMeasure, Coupling]:
    """
    Push the source through the model and solve OT to the target

    Since the pushforward keeps point order, the plan between the pushed cloud
    and the target is also the coupling between source and target points.
    """
    pushed = empirical_pushforward(source, model.evaluate)
    return pushed, solve_discrete_ot(pushed, target)


def _pair_terms(model: BasisModel, source: EmpiricalMeasure, target: EmpiricalMeasure,
                with_gradient: bool) -> Tuple[float, Optional[np.ndarray], Coupling]:
    pushed, coupling = pair_coupling(model, source, target)
    if not with_gradient:
        return coupling.cost, None, coupling

    y = model.basis.design(source.points)
    plan = coupling.plan
    # sum_jk plan_jk Y_j^T (S_j - x'_k) = sum_j Y_j^T (r_j S_j - (plan x')_j)
    residual = plan.sum(axis=1)[:, None] * pushed.points - plan @ target.points
    grad = 2.0 * np.einsum("ndp,nd->p", y, residual)
    return coupling.cost, grad, coupling


def empirical_objective(
    model: BasisModel,
    snapshots: Sequence[EmpiricalMeasure],
    with_gradient: bool = True,
    workers: int = 1,
) -> Tuple[float, Optional[np.ndarray], List[Coupling]]:
    """
    Cost, gradient and optimal couplings for a basis model

    Per-pair solves may run on a thread pool; the reduction over pairs always
    runs in pair order.

    Returns:
        (cost, gradient or None, couplings per pair)
    """
    _check_snapshots(snapshots, model)
    terms = _map_pairs(
        lambda i: _pair_terms(model, snapshots[i], snapshots[i + 1], with_gradient),
        len(snapshots) - 1,
        workers,
    )

    cost = 0.0
    grad = np.zeros(model.basis.n_params) if with_gradient else None
    for pair_cost, pair_grad, _ in terms:
        cost += pair_cost
        if with_gradient:
            grad = grad + pair_grad
    return _clamp_cost(cost), grad, [t[2] for t in terms]


def empirical_cost(model: BasisModel, snapshots: Sequence[EmpiricalMeasure], workers: int = 1) -> float:
    """F(theta) = sum_i W2^2(S(.; theta)#mu_i, mu_{i+1})"""
    return empirical_objective(model, snapshots, with_gradient=False, workers=workers)[0]


def empirical_gradient(model: BasisModel, snapshots: Sequence[EmpiricalMeasure], workers: int = 1) -> np.ndarray:
    """2 sum_i sum_jk plan_jk Y(x_j)^T (S(x_j; theta) - x'_k) with plans from exact OT"""
    return empirical_objective(model, snapshots, with_gradient=True, workers=workers)[1]
