"""
Configuration Management System
Loads numerical settings from YAML file or environment variables
"""

import logging
from pathlib import Path
from typing import Literal

import yaml
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from rich.console import Console
from rich.logging import RichHandler


DEFAULT_CONFIG_FILE = ".wassreg-config.yaml"


class Settings(BaseSettings):
    """Numerical tolerances and descent defaults with validation"""

    # Linear algebra tolerances
    symmetry_tol: float = Field(
        default=1e-8,
        gt=0.0,
        description="Relative asymmetry accepted by symmetric eigensolvers"
    )
    psd_clamp_tol: float = Field(
        default=1e-10,
        ge=0.0,
        description="Eigenvalues above -tol*lambda_max are clamped to zero"
    )
    strict_pd_ratio: float = Field(
        default=1e-12,
        ge=0.0,
        description="Minimum lambda_min/lambda_max for a matrix to count as positive definite"
    )
    condition_limit: float = Field(
        default=1e12,
        gt=1.0,
        description="Condition estimate above which a matrix is treated as singular"
    )

    # Transport tolerances
    marginal_tol: float = Field(
        default=1e-9,
        gt=0.0,
        description="Allowed deviation of coupling marginals"
    )
    trace_clamp_tol: float = Field(
        default=1e-9,
        ge=0.0,
        description="Negative squared distances above -tol are reported as zero"
    )
    cost_clamp_tol: float = Field(
        default=1e-8,
        ge=0.0,
        description="Negative objective values above -tol are reported as zero"
    )

    # Descent defaults
    alpha: float = Field(default=0.1, gt=0.0, description="Gradient step size")
    max_iters: int = Field(default=500, ge=0, description="Iteration cap")
    grad_tol: float = Field(default=1e-6, ge=0.0, description="Gradient-norm stop threshold")
    backtracking: bool = Field(default=False, description="Enable Armijo backtracking")
    shrink: float = Field(default=0.5, gt=0.0, lt=1.0, description="Backtracking shrink factor")
    armijo: float = Field(default=1e-4, gt=0.0, lt=1.0, description="Sufficient-decrease constant")
    reduction: Literal["mean", "sum"] = Field(
        default="mean",
        description="Objective reduction over snapshot pairs used by the descent step"
    )
    workers: int = Field(default=1, ge=1, le=64, description="Threads for per-pair transport solves")

    # Runs
    seed: int = Field(default=0, ge=0, description="Master seed for every random draw")
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        default="WARNING",
        description="Library log level"
    )

    model_config = SettingsConfigDict(
        env_prefix="WASSREG_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    @classmethod
    def from_yaml(cls, config_path: str = DEFAULT_CONFIG_FILE) -> "Settings":
        """
        Load settings from YAML file, falling back to environment variables

        Args:
            config_path: Path to YAML config file

        Returns:
            Settings instance
        """
        if Path(config_path).exists():
            try:
                with open(config_path, "r") as f:
                    yaml_data = yaml.safe_load(f) or {}
                return cls(**yaml_data)
            except Exception as e:
                get_logger(__name__).warning(
                    "Could not load %s (%s), falling back to environment variables", config_path, e
                )

        return cls()


_configured = False


def configure_logging(level: str = "WARNING") -> None:
    """Install a single rich handler on the package logger"""
    global _configured
    root = logging.getLogger("wassreg")
    root.setLevel(level)
    if not _configured:
        handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=True)
        handler.setFormatter(logging.Formatter("%(message)s"))
        root.addHandler(handler)
        root.propagate = False
        _configured = True


def get_logger(name: str) -> logging.Logger:
    """Logger under the package namespace"""
    return logging.getLogger(name if name.startswith("wassreg") else f"wassreg.{name}")


# Global settings instance
settings = Settings.from_yaml()
configure_logging(settings.log_level)
