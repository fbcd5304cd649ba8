"""
Dense Symmetric Linear Algebra
Eigendecomposition, SPD square roots, and guarded inversion
"""

from .spd import (
    SymEig,
    symmetrize,
    sym_eig,
    is_psd,
    sqrt_spd,
    inv_sqrt_spd,
    sqrt_product,
    condition_estimate,
    inverse,
)

__all__ = [
    "SymEig",
    "symmetrize",
    "sym_eig",
    "is_psd",
    "sqrt_spd",
    "inv_sqrt_spd",
    "sqrt_product",
    "condition_estimate",
    "inverse",
]
