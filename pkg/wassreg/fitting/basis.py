"""
Basis-Parametrized Maps
S(x; theta) = Y(x) theta for linear, affine, shifted-monomial and custom families
"""

from abc import ABC, abstractmethod
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from wassreg.errors import DimensionMismatchError, ModelBlowupError


class BasisFamily(ABC):
    """
    Abstract base class for basis families
    A family evaluates the d x p matrix Y(x) at every point of a cloud
    """

    name: str = "basis"

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError(f"{self.__class__.__name__} needs dim >= 1, got {dim}")
        self.dim = dim

    @property
    @abstractmethod
    def n_params(self) -> int:
        """Number of parameters p"""
        pass

    @abstractmethod
    def _design(self, points: np.ndarray) -> np.ndarray:
        """Y evaluated at each point, shape (n, d, p)"""
        pass

    def design(self, points) -> np.ndarray:
        """
        Evaluate Y(x) for every point

        Args:
            points: Array of shape (n, d)

        Returns:
            Array of shape (n, d, p)
        """
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points.reshape(-1, self.dim)
        if points.shape[1] != self.dim:
            raise DimensionMismatchError(f"{self.name} basis expects d={self.dim}, got {points.shape[1]}")

        y = self._design(points)
        if y.shape != (points.shape[0], self.dim, self.n_params):
            raise DimensionMismatchError(
                f"{self.name} basis returned shape {y.shape}, "
                f"expected {(points.shape[0], self.dim, self.n_params)}"
            )
        if not np.all(np.isfinite(y)):
            raise ModelBlowupError(f"{self.name} basis produced non-finite values")
        return y

    def identity_theta(self) -> Optional[np.ndarray]:
        """Parameters reproducing S(x) = x, when the family contains the identity"""
        return None

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(dim={self.dim}, n_params={self.n_params})"


class LinearBasis(BasisFamily):
    """S(x) = A x with theta = A flattened row-major; y_(j,k)(x) = e_j x_k"""

    name = "linear"

    @property
    def n_params(self) -> int:
        return self.dim * self.dim

    def _design(self, points: np.ndarray) -> np.ndarray:
        n, d = points.shape
        y = np.zeros((n, d, d * d))
        for j in range(d):
            y[:, j, j * d:(j + 1) * d] = points
        return y

    def identity_theta(self) -> np.ndarray:
        return np.eye(self.dim).ravel()

    def to_matrix(self, theta) -> np.ndarray:
        return np.asarray(theta, dtype=float).reshape(self.dim, self.dim)

    def from_matrix(self, a) -> np.ndarray:
        a = np.atleast_2d(np.asarray(a, dtype=float))
        if a.shape != (self.dim, self.dim):
            raise DimensionMismatchError(f"Expected a {self.dim}x{self.dim} matrix, got {a.shape}")
        return a.ravel().copy()


class AffineBasis(LinearBasis):
    """S(x) = A x + b with theta = [vec(A), b]"""

    name = "affine"

    @property
    def n_params(self) -> int:
        return self.dim * self.dim + self.dim

    def _design(self, points: np.ndarray) -> np.ndarray:
        n, d = points.shape
        y = np.zeros((n, d, self.n_params))
        y[:, :, :d * d] = super()._design(points)
        y[:, :, d * d:] = np.eye(d)
        return y

    def identity_theta(self) -> np.ndarray:
        return np.concatenate([np.eye(self.dim).ravel(), np.zeros(self.dim)])


class ShiftedMonomialBasis(BasisFamily):
    """One-dimensional S(x) = sum_i theta_i (1 - x)^{p_i}"""

    name = "shifted-monomials-1d"

    def __init__(self, exponents: Sequence[int] = (3, 1, 0), shift: float = 1.0):
        super().__init__(dim=1)
        if len(exponents) < 1:
            raise ValueError("Need at least one exponent")
        if any(int(p) != p or p < 0 for p in exponents):
            raise ValueError(f"Exponents must be nonnegative integers, got {list(exponents)}")
        self.exponents: Tuple[int, ...] = tuple(int(p) for p in exponents)
        self.shift = shift

    @property
    def n_params(self) -> int:
        return len(self.exponents)

    def _design(self, points: np.ndarray) -> np.ndarray:
        u = self.shift - points[:, 0]
        cols = [u ** p for p in self.exponents]
        return np.stack(cols, axis=-1)[:, None, :]

    def identity_theta(self) -> Optional[np.ndarray]:
        # x = shift * 1 - (shift - x) needs exponents 0 and 1
        if 0 in self.exponents and 1 in self.exponents:
            theta = np.zeros(self.n_params)
            theta[self.exponents.index(0)] = self.shift
            theta[self.exponents.index(1)] = -1.0
            return theta
        return None


class CustomBasis(BasisFamily):
    """User-supplied evaluator returning Y with shape (n, d, p)"""

    name = "custom"

    def __init__(self, evaluator: Callable[[np.ndarray], np.ndarray], dim: int, n_params: int,
                 identity: Optional[Sequence[float]] = None, name: str = "custom"):
        super().__init__(dim)
        self._evaluator = evaluator
        self._n_params = n_params
        self._identity = None if identity is None else np.asarray(identity, dtype=float)
        self.name = name

    @property
    def n_params(self) -> int:
        return self._n_params

    def _design(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(self._evaluator(points), dtype=float)

    def identity_theta(self) -> Optional[np.ndarray]:
        return None if self._identity is None else self._identity.copy()


class BasisFamilies:
    """
    Registry of named basis families
    Supports lookup by name and registration of new families
    """

    _families = {
        "linear": LinearBasis,
        "affine": AffineBasis,
        "shifted-monomials-1d": ShiftedMonomialBasis,
    }

    @classmethod
    def create(cls, name: str, dim: int = 1, **kwargs) -> BasisFamily:
        """
        Create a basis family instance

        Args:
            name: Registered family name
            dim: State dimension (ignored by one-dimensional families)
            **kwargs: Family-specific options such as exponents

        Raises:
            ValueError: If the name is unknown
        """
        key = name.lower()
        if key not in cls._families:
            available = ", ".join(cls._families.keys())
            raise ValueError(f"Unknown basis '{name}'. Available bases: {available}")

        family_class = cls._families[key]
        if issubclass(family_class, ShiftedMonomialBasis):
            return family_class(**kwargs)
        return family_class(dim=dim, **kwargs)

    @classmethod
    def list_families(cls) -> list[str]:
        return list(cls._families.keys())

    @classmethod
    def register(cls, name: str, family_class: type) -> None:
        """Register a new family class"""
        if not issubclass(family_class, BasisFamily):
            raise TypeError(f"{family_class} must inherit from BasisFamily")
        cls._families[name.lower()] = family_class


class BasisModel(BaseModel):
    """Parameter vector together with the family that turns it into a map"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    theta: np.ndarray = Field(description="Parameters, shape (p,)")
    basis: BasisFamily = Field(description="Basis family evaluating Y(x)")

    @field_validator("theta", mode="before")
    @classmethod
    def _coerce_theta(cls, v):
        arr = np.array(np.atleast_1d(np.asarray(v, dtype=float)).ravel(), copy=True)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check_size(self) -> "BasisModel":
        if self.theta.shape != (self.basis.n_params,):
            raise DimensionMismatchError(
                f"{self.basis.name} basis needs {self.basis.n_params} parameters, got {self.theta.shape[0]}"
            )
        return self

    @property
    def dim(self) -> int:
        return self.basis.dim

    @classmethod
    def linear(cls, a) -> "BasisModel":
        """Model of the linear map x -> A x"""
        a = np.atleast_2d(np.asarray(a, dtype=float))
        basis = LinearBasis(dim=a.shape[0])
        return cls(theta=basis.from_matrix(a), basis=basis)

    def with_theta(self, theta) -> "BasisModel":
        return BasisModel(theta=theta, basis=self.basis)

    def evaluate(self, points) -> np.ndarray:
        """S(x; theta) for every point, shape (n, d)"""
        return np.einsum("ndp,p->nd", self.basis.design(points), self.theta)

    def __call__(self, points) -> np.ndarray:
        return self.evaluate(points)


def linear_basis(dim: int) -> LinearBasis:
    return LinearBasis(dim=dim)


def affine_basis(dim: int) -> AffineBasis:
    return AffineBasis(dim=dim)


def shifted_monomials_basis(exponents: Sequence[int] = (3, 1, 0), shift: float = 1.0) -> ShiftedMonomialBasis:
    return ShiftedMonomialBasis(exponents=exponents, shift=shift)


def custom_basis(evaluator: Callable[[np.ndarray], np.ndarray], dim: int, n_params: int,
                 identity: Optional[Sequence[float]] = None, name: str = "custom") -> CustomBasis:
    """Wrap a user evaluator; it must return an array of shape (n, dim, n_params)"""
    return CustomBasis(evaluator, dim=dim, n_params=n_params, identity=identity, name=name)
