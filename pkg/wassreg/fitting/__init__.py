"""
Wasserstein Regression Fits
Objectives, gradients, and descent for linear and basis-parametrized maps
"""

from .basis import (
    BasisFamily,
    LinearBasis,
    AffineBasis,
    ShiftedMonomialBasis,
    CustomBasis,
    BasisFamilies,
    BasisModel,
    linear_basis,
    affine_basis,
    shifted_monomials_basis,
    custom_basis,
)
from .state import DescentConfig, TraceRecord, FitTrace
from .objectives import (
    gaussian_cost,
    gaussian_gradient,
    gaussian_objective,
    empirical_cost,
    empirical_gradient,
    empirical_objective,
    pair_coupling,
)
from .descent import (
    DescentRunner,
    averaged_monge_init,
    fit_linear_gaussian,
    fit_basis_empirical,
    pseudo_metric,
    predict_sequence,
    rollout_gaussian,
    rollout_empirical,
)

__all__ = [
    "BasisFamily",
    "LinearBasis",
    "AffineBasis",
    "ShiftedMonomialBasis",
    "CustomBasis",
    "BasisFamilies",
    "BasisModel",
    "linear_basis",
    "affine_basis",
    "shifted_monomials_basis",
    "custom_basis",
    "DescentConfig",
    "TraceRecord",
    "FitTrace",
    "gaussian_cost",
    "gaussian_gradient",
    "gaussian_objective",
    "empirical_cost",
    "empirical_gradient",
    "empirical_objective",
    "pair_coupling",
    "DescentRunner",
    "averaged_monge_init",
    "fit_linear_gaussian",
    "fit_basis_empirical",
    "pseudo_metric",
    "predict_sequence",
    "rollout_gaussian",
    "rollout_empirical",
]
