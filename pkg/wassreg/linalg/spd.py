"""
SPD Matrix Kernels
Small dense kernels behind every Gaussian closed form
"""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from wassreg.config import settings
from wassreg.errors import (
    ConvergenceError,
    DimensionMismatchError,
    NearSingularError,
    NotPSDError,
    NotSymmetricError,
)


class SymEig(BaseModel):
    """Eigendecomposition of a symmetric matrix, eigenvalues ascending"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    eigenvalues: np.ndarray = Field(description="Eigenvalues in ascending order, shape (d,)")
    eigenvectors: np.ndarray = Field(description="Orthogonal matrix with eigenvectors as columns")

    def reconstruct(self) -> np.ndarray:
        """V diag(lambda) V^T"""
        v = self.eigenvectors
        return symmetrize((v * self.eigenvalues) @ v.T)

    def apply(self, fn) -> np.ndarray:
        """Spectral function V diag(fn(lambda)) V^T"""
        v = self.eigenvectors
        return symmetrize((v * fn(self.eigenvalues)) @ v.T)


def _as_square(a, name: str = "matrix") -> np.ndarray:
    arr = np.atleast_2d(np.asarray(a, dtype=float))
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {arr.shape}")
    return arr


def symmetrize(x: np.ndarray) -> np.ndarray:
    """(X + X^T) / 2"""
    x = np.asarray(x, dtype=float)
    return 0.5 * (x + x.T)


def sym_eig(s, tol: Optional[float] = None) -> SymEig:
    """
    Eigendecomposition of a symmetric matrix

    Args:
        s: Symmetric d x d matrix
        tol: Relative symmetry tolerance (defaults to settings.symmetry_tol)

    Returns:
        SymEig with ascending eigenvalues

    Raises:
        NotSymmetricError: If asymmetry exceeds tol * (1 + max|s|)
        ConvergenceError: If LAPACK does not converge
    """
    s = _as_square(s)
    tol = settings.symmetry_tol if tol is None else tol

    scale = 1.0 + float(np.max(np.abs(s)))
    asym = float(np.max(np.abs(s - s.T)))
    if asym > tol * scale:
        raise NotSymmetricError(f"Matrix is not symmetric: max |S - S^T| = {asym:.3e}")

    try:
        eigenvalues, eigenvectors = np.linalg.eigh(symmetrize(s))
    except np.linalg.LinAlgError as e:
        raise ConvergenceError(f"Symmetric eigensolver failed: {e}")

    return SymEig(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def _clamped(eig: SymEig, clamp_tol: float) -> np.ndarray:
    lam = eig.eigenvalues
    lam_max = max(float(lam[-1]), 0.0)
    floor = -clamp_tol * lam_max
    if lam[0] < floor:
        raise NotPSDError(
            f"Matrix is not positive semidefinite: smallest eigenvalue {lam[0]:.3e}",
            min_eigenvalue=float(lam[0]),
        )
    return np.clip(lam, 0.0, None)


def is_psd(s, clamp_tol: Optional[float] = None) -> bool:
    """True when s is symmetric and passes the PSD clamp test"""
    clamp_tol = settings.psd_clamp_tol if clamp_tol is None else clamp_tol
    try:
        _clamped(sym_eig(s), clamp_tol)
    except (NotSymmetricError, NotPSDError):
        return False
    return True


def sqrt_spd(s, clamp_tol: Optional[float] = None) -> np.ndarray:
    """
    Principal square root of a symmetric PSD matrix

    Eigenvalues in [-clamp_tol * lambda_max, 0) are clamped to zero.

    Raises:
        NotPSDError: If an eigenvalue falls below the clamping threshold
    """
    clamp_tol = settings.psd_clamp_tol if clamp_tol is None else clamp_tol
    eig = sym_eig(s)
    lam = _clamped(eig, clamp_tol)
    return eig.apply(lambda _: np.sqrt(lam))


def _require_pd(eig: SymEig, ratio: float, name: str) -> None:
    lam = eig.eigenvalues
    lam_max = float(lam[-1])
    if lam_max <= 0.0 or lam[0] <= ratio * lam_max:
        condition = np.inf if lam[0] <= 0.0 else lam_max / float(lam[0])
        raise NearSingularError(
            f"{name} is numerically singular (lambda_min={lam[0]:.3e}, lambda_max={lam_max:.3e})",
            condition=condition,
        )


def inv_sqrt_spd(s, ratio: Optional[float] = None) -> np.ndarray:
    """Inverse principal square root of a strictly positive definite matrix"""
    ratio = settings.strict_pd_ratio if ratio is None else ratio
    eig = sym_eig(s)
    _require_pd(eig, ratio, "Matrix")
    return eig.apply(lambda lam: 1.0 / np.sqrt(lam))


def sqrt_product(c, b, ratio: Optional[float] = None) -> np.ndarray:
    """
    Square root of the product C B for C positive definite and B PSD

    Computed as C^{1/2} (C^{1/2} B C^{1/2})^{1/2} C^{-1/2}, so M @ M = C @ B.

    Args:
        c: Strictly positive definite matrix
        b: Positive semidefinite matrix
        ratio: Minimum lambda_min / lambda_max of c

    Raises:
        NearSingularError: If c is numerically singular
    """
    c = _as_square(c, "c")
    b = _as_square(b, "b")
    if c.shape != b.shape:
        raise DimensionMismatchError(f"Shapes differ: {c.shape} vs {b.shape}")
    ratio = settings.strict_pd_ratio if ratio is None else ratio

    eig = sym_eig(c)
    _require_pd(eig, ratio, "c")
    c_half = eig.apply(np.sqrt)
    c_inv_half = eig.apply(lambda lam: 1.0 / np.sqrt(lam))

    inner = sqrt_spd(symmetrize(c_half @ b @ c_half))
    return c_half @ inner @ c_inv_half


def condition_estimate(a) -> float:
    """2-norm condition number (inf for singular or non-finite input)"""
    a = _as_square(a)
    if not np.all(np.isfinite(a)):
        return float("inf")
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[-1] == 0.0:
        return float("inf")
    return float(sv[0] / sv[-1])


def inverse(a, limit: Optional[float] = None) -> np.ndarray:
    """
    Guarded matrix inverse

    Raises:
        NearSingularError: If condition_estimate(a) >= limit
    """
    a = _as_square(a)
    limit = settings.condition_limit if limit is None else limit
    condition = condition_estimate(a)
    if not condition < limit:
        raise NearSingularError(
            f"Matrix is near-singular (condition estimate {condition:.3e})",
            condition=condition,
        )
    return np.linalg.inv(a)
