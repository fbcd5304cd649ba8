"""
Exact Discrete Optimal Transport
Assignment, monotone matching, and transportation simplex for point clouds
"""

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linear_sum_assignment, linprog

from wassreg.config import get_logger
from wassreg.errors import ConvergenceError, DimensionMismatchError
from wassreg.measures import EmpiricalMeasure
from .coupling import Coupling, pairwise_sq_dists


logger = get_logger(__name__)


def _monotone_matching(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Sort-induced permutation: k-th smallest source goes to k-th smallest target"""
    order_x = np.argsort(x, kind="stable")
    order_y = np.argsort(y, kind="stable")
    perm = np.empty_like(order_x)
    perm[order_x] = order_y
    return perm


def _permutation_coupling(e0: EmpiricalMeasure, e1: EmpiricalMeasure, cols: np.ndarray,
                          costs: np.ndarray) -> Coupling:
    rows = np.arange(e0.n)
    plan = np.zeros((e0.n, e1.n))
    plan[rows, cols] = e0.weights
    return Coupling(
        plan=plan,
        source_weights=e0.weights,
        target_weights=e1.weights,
        cost=float(np.sum(e0.weights * costs[rows, cols])),
    )


def _transportation_simplex(e0: EmpiricalMeasure, e1: EmpiricalMeasure, costs: np.ndarray) -> Coupling:
    n0, n1 = costs.shape
    # Row-sum and column-sum constraints on the row-major flattened plan
    a_rows = sp.kron(sp.eye(n0), np.ones((1, n1)))
    a_cols = sp.kron(np.ones((1, n0)), sp.eye(n1))
    a_eq = sp.vstack([a_rows, a_cols]).tocsr()
    b_eq = np.concatenate([e0.weights, e1.weights])

    # One equation is implied by the others (both marginals sum to one)
    result = linprog(
        costs.ravel(),
        A_eq=a_eq[:-1],
        b_eq=b_eq[:-1],
        bounds=(0.0, None),
        method="highs-ds",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if result.status != 0:
        raise ConvergenceError(f"Transportation simplex failed: {result.message}")

    plan = np.clip(result.x.reshape(n0, n1), 0.0, None)
    return Coupling(
        plan=plan,
        source_weights=e0.weights,
        target_weights=e1.weights,
        cost=float(np.sum(plan * costs)),
    )


def solve_discrete_ot(e0: EmpiricalMeasure, e1: EmpiricalMeasure) -> Coupling:
    """
    Exact optimal coupling for the squared Euclidean ground cost

    Equal-size uniform inputs become an assignment problem (monotone matching
    on the line, shortest augmenting path otherwise). Everything else goes to
    a dual simplex solve of the transportation LP.

    Args:
        e0: Source measure
        e1: Target measure

    Returns:
        Optimal Coupling (a vertex of the transport polytope)

    Raises:
        DimensionMismatchError: If the measures live in different dimensions
    """
    if e0.dim != e1.dim:
        raise DimensionMismatchError(f"Measure dimensions differ: {e0.dim} vs {e1.dim}")
    if not (np.all(np.isfinite(e0.points)) and np.all(np.isfinite(e1.points))):
        raise ValueError("Measures must have finite points")

    costs = pairwise_sq_dists(e0.points, e1.points)

    if e0.n == 1 or e1.n == 1:
        plan = np.outer(e0.weights, e1.weights)
        return Coupling(
            plan=plan,
            source_weights=e0.weights,
            target_weights=e1.weights,
            cost=float(np.sum(plan * costs)),
        )

    if e0.n == e1.n and e0.is_uniform and e1.is_uniform:
        if e0.dim == 1:
            cols = _monotone_matching(e0.points[:, 0], e1.points[:, 0])
        else:
            _, cols = linear_sum_assignment(costs)
        return _permutation_coupling(e0, e1, cols, costs)

    logger.debug("Transportation simplex on a %dx%d problem", e0.n, e1.n)
    return _transportation_simplex(e0, e1, costs)


def w2_empirical(e0: EmpiricalMeasure, e1: EmpiricalMeasure) -> float:
    """Wasserstein-2 distance between two point clouds"""
    return float(np.sqrt(max(solve_discrete_ot(e0, e1).cost, 0.0)))
