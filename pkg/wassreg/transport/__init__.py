"""
Wasserstein Transport
Couplings, exact discrete solvers, and Gaussian closed forms
"""

from .coupling import Coupling, pairwise_sq_dists
from .discrete import solve_discrete_ot, w2_empirical
from .gaussian import w2_gaussian, w2_squared_gaussian, monge_map_gaussian, bures_cross_term

__all__ = [
    "Coupling",
    "pairwise_sq_dists",
    "solve_discrete_ot",
    "w2_empirical",
    "w2_gaussian",
    "w2_squared_gaussian",
    "monge_map_gaussian",
    "bures_cross_term",
]
