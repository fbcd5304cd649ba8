"""
Experiment Configuration
Resolved parameters for one run, loadable from YAML or JSON with flag overrides
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import numpy as np
import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator

from wassreg.config import settings
from wassreg.errors import InputParseError
from wassreg.fitting import BasisFamilies, BasisFamily, DescentConfig
from wassreg.measures import CUBIC_COEFFICIENTS, AR1_A0, Ar1Config
from wassreg.measures.synthetic import AR1_NOISE_SCALE


# flag name -> DescentConfig field
DESCENT_OVERRIDES = {
    "alpha": "step",
    "max_iters": "max_iters",
    "grad_tol": "grad_tol",
    "backtracking": "backtracking",
    "workers": "workers",
    "record_plans": "record_plans",
}


class ExperimentConfig(BaseModel):
    """Everything needed to reproduce a run"""

    kind: Literal["ar1-gaussian", "cubic-empirical", "custom"] = Field(
        default="ar1-gaussian",
        description="Built-in experiment or custom input files"
    )
    seed: int = Field(default_factory=lambda: settings.seed, ge=0, description="Master seed")
    out_dir: str = Field(default="runs/latest", description="Directory receiving run outputs")

    # Linear Gaussian dynamics
    a0: List[List[float]] = Field(default_factory=lambda: AR1_A0.tolist(), description="Generating matrix")
    noise_scale: float = Field(default=AR1_NOISE_SCALE, ge=0.0, description="Q = noise_scale^2 I")
    c1: Optional[List[List[float]]] = Field(default=None, description="First covariance (identity when omitted)")
    steps: int = Field(default=6, ge=2, description="Number of snapshots m")
    n_samples: Optional[int] = Field(
        default=None, ge=1,
        description="Simulate this many trajectories instead of the exact covariance recursion"
    )
    init: Literal["identity", "average"] = Field(default="identity", description="Starting matrix for fit-gaussian")

    # Basis fits on point clouds
    grid_size: int = Field(default=100, ge=1, description="Points in the first cubic snapshot")
    sampling: Literal["grid", "random"] = Field(default="grid", description="Midpoint grid or uniform draws")
    cubic_steps: int = Field(default=2, ge=2, description="Snapshots produced by the cubic generator")
    coefficients: List[float] = Field(default_factory=lambda: list(CUBIC_COEFFICIENTS),
                                      description="Generating cubic coefficients")
    basis: str = Field(default="shifted-monomials-1d", description="Registered basis family")
    exponents: List[int] = Field(default_factory=lambda: [3, 1, 0], description="Shifted-monomial exponents")
    theta_init: Optional[List[float]] = Field(default_factory=lambda: [-2.0, 0.0, 2.0],
                                              description="Starting parameters (family identity when null)")
    iterations: Optional[List[int]] = Field(
        default=None,
        description="Iterations dumped to map_curves.csv and densities.csv (a default spread when null)"
    )

    descent: DescentConfig = Field(default_factory=DescentConfig)

    class Config:
        json_schema_extra = {
            "example": {
                "kind": "cubic-empirical",
                "seed": 0,
                "out_dir": "runs/cubic",
                "grid_size": 200,
                "theta_init": [-2.0, 0.0, 2.0],
                "descent": {"step": 0.1, "max_iters": 1000},
            }
        }

    @field_validator("coefficients")
    @classmethod
    def _three_coefficients(cls, v: List[float]) -> List[float]:
        if len(v) != 3:
            raise ValueError(f"Cubic map needs 3 coefficients, got {len(v)}")
        return v

    @classmethod
    def load(cls, path: Optional[str] = None, **overrides: Any) -> "ExperimentConfig":
        """
        Build a config from an optional YAML/JSON file and flag overrides

        Args:
            path: Config file, parsed as JSON for a .json suffix and YAML otherwise
            **overrides: Values from command-line flags; None means "not given"

        Raises:
            InputParseError: If the file is unreadable or fails validation
        """
        data: Dict[str, Any] = {}
        if path is not None:
            try:
                text = Path(path).read_text()
            except OSError as e:
                raise InputParseError(f"Cannot read config: {e.strerror}", path) from e
            # YAML 1.1 reads exponent floats without a dot (1e-06) as strings
            if Path(path).suffix.lower() == ".json":
                try:
                    data = json.loads(text) or {}
                except json.JSONDecodeError as e:
                    raise InputParseError(f"Invalid config syntax: {e.msg}", path, e.lineno) from e
            else:
                try:
                    data = yaml.safe_load(text) or {}
                except yaml.YAMLError as e:
                    mark = getattr(e, "problem_mark", None)
                    raise InputParseError(f"Invalid config syntax: {e}", path,
                                          mark.line + 1 if mark is not None else None) from e
            if not isinstance(data, dict):
                raise InputParseError("Config must be a mapping", path, 1)

        descent = dict(data.get("descent") or {})
        for flag, field in DESCENT_OVERRIDES.items():
            value = overrides.pop(flag, None)
            if value is not None:
                descent[field] = value
        data["descent"] = descent
        data.update({k: v for k, v in overrides.items() if v is not None})

        try:
            cfg = cls(**data)
        except ValidationError as e:
            raise InputParseError(f"Invalid config: {e}", path) from e

        cfg.descent.seed = cfg.seed
        return cfg

    def ar1_config(self, noise: bool = True) -> Ar1Config:
        d = len(self.a0)
        c1 = np.eye(d) if self.c1 is None else self.c1
        q = (self.noise_scale ** 2 if noise else 0.0) * np.eye(d)
        return Ar1Config(a0=self.a0, noise_cov=q, c1=c1, steps=self.steps)

    def basis_family(self, dim: int = 1) -> BasisFamily:
        if self.basis.lower() == "shifted-monomials-1d":
            return BasisFamilies.create(self.basis, exponents=tuple(self.exponents))
        return BasisFamilies.create(self.basis, dim=dim)

    def selected_iterations(self, last: int) -> List[int]:
        """Requested dump iterations clipped to the run, always including the final one"""
        if self.iterations is not None:
            chosen = {i for i in self.iterations if 0 <= i <= last}
        else:
            chosen = {i for i in (0, 1, 2, 5, 10, 20, 50, 100, 200, 500) if i <= last}
        chosen.add(last)
        return sorted(chosen)
