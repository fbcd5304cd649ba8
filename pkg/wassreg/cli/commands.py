"""
CLI Commands Implementation
Handlers behind every subcommand; exit 1 on bad input, 2 on numerical failure
"""

from pathlib import Path
from typing import Optional

import numpy as np
import typer

from wassreg.baselines import (
    UlamGrid,
    coordinate_dictionary,
    dmd_least_squares,
    edmd_fit,
    monomial_dictionary,
    ulam_matrix,
)
from wassreg.config import get_logger
from wassreg.errors import InputParseError, WassregError
from wassreg.experiments import (
    ExperimentConfig,
    ExperimentRunner,
    load_measure,
    load_trajectory,
    write_coupling_csv,
    write_matrix_csv,
)
from wassreg.measures import GaussianMeasure, cubic_map, sample_gaussian
from wassreg.transport import solve_discrete_ot, w2_gaussian
from .ui import CliUI


logger = get_logger(__name__)

EXIT_INPUT = 1
EXIT_NUMERIC = 2


def format_distance(value: float) -> str:
    """Positional decimal with exactly 12 significant digits (5 -> 5.00000000000)"""
    return np.format_float_positional(
        float(value), precision=12, unique=False, fractional=False, trim="k"
    )


class Commands:
    """CLI command implementations"""

    def __init__(self, quiet: bool = False):
        self.ui = CliUI()
        self.quiet = quiet

    def _fail(self, error: Exception) -> None:
        """Report an error and leave with the matching exit code"""
        self.ui.print_error(str(error))
        numeric = isinstance(error, WassregError) and not isinstance(error, InputParseError)
        code = EXIT_NUMERIC if numeric else EXIT_INPUT
        raise typer.Exit(code)

    def load_config(self, config: Optional[str], **overrides) -> ExperimentConfig:
        try:
            return ExperimentConfig.load(config, **overrides)
        except InputParseError as e:
            self._fail(e)

    # ------------------------------------------------------------------
    # Experiments
    # ------------------------------------------------------------------

    def simulate_ar1(self, cfg: ExperimentConfig):
        """Write the AR(1) snapshot file"""
        if not self.quiet:
            self.ui.print_header("📈 Simulate AR(1) snapshots", cfg.out_dir)
        try:
            path = ExperimentRunner(cfg).simulate_ar1()
        except (WassregError, ValueError, OSError) as e:
            self._fail(e)
        if cfg.n_samples is not None:
            self.ui.print_info(f"Snapshots are clouds of {cfg.n_samples} simulated trajectories")
        self.ui.print_success(f"Wrote {cfg.steps} snapshots to {path}")

    def _report(self, artifact):
        if not self.quiet:
            self.ui.show_run_table(artifact)
        if artifact.failed:
            self.ui.print_error(f"Fit stopped: {artifact.message}")
            raise typer.Exit(EXIT_NUMERIC)
        if artifact.status == "max-iters":
            self.ui.print_warning("Iteration cap reached before the gradient tolerance")
        self.ui.print_success(f"Run written to {Path(artifact.config['out_dir'])}")

    def fit_gaussian(self, cfg: ExperimentConfig, snapshots: Optional[str] = None):
        """Linear fit on Gaussian snapshots"""
        if not self.quiet:
            self.ui.print_header("🔧 Fit linear map to Gaussian snapshots", cfg.out_dir)
        try:
            with self.ui.status("Descending..."):
                artifact = ExperimentRunner(cfg).fit_gaussian(snapshots)
        except (WassregError, ValueError, OSError) as e:
            self._fail(e)
        self._report(artifact)

    def fit_empirical(self, cfg: ExperimentConfig, snapshots: Optional[str] = None):
        """Basis fit on point-cloud snapshots"""
        if not self.quiet:
            self.ui.print_header("🔧 Fit basis map to point-cloud snapshots", cfg.out_dir)
        try:
            with self.ui.status("Descending..."):
                artifact = ExperimentRunner(cfg).fit_empirical(snapshots)
        except (WassregError, ValueError, OSError) as e:
            self._fail(e)
        self._report(artifact)

    # ------------------------------------------------------------------
    # Transport and baselines
    # ------------------------------------------------------------------

    def ot(self, source: str, target: str, out_dir: str, mode: str = "closed",
           samples: int = 2000, seed: int = 0):
        """
        W2 between two measure files

        Gaussian pairs use the closed form unless mode is "sampled"; any
        Gaussian side of a discrete solve is sampled with a seed derived from
        the master seed. The distance goes to stdout with 12 significant digits.
        """
        try:
            mu0, mu1 = load_measure(source), load_measure(target)
            if mu0.dim != mu1.dim:
                raise InputParseError(f"Measures live in different dimensions ({mu0.dim} vs {mu1.dim})")

            both_gaussian = isinstance(mu0, GaussianMeasure) and isinstance(mu1, GaussianMeasure)
            if both_gaussian and mode == "closed":
                typer.echo(format_distance(w2_gaussian(mu0, mu1)))
                return

            seeds = np.random.SeedSequence(seed).generate_state(2)
            if isinstance(mu0, GaussianMeasure):
                mu0 = sample_gaussian(mu0, samples, int(seeds[0]))
            if isinstance(mu1, GaussianMeasure):
                mu1 = sample_gaussian(mu1, samples, int(seeds[1]))

            coupling = solve_discrete_ot(mu0, mu1)
            path = write_coupling_csv(Path(out_dir) / "coupling.csv", coupling)
        except (WassregError, ValueError, OSError) as e:
            self._fail(e)

        typer.echo(format_distance(np.sqrt(max(coupling.cost, 0.0))))
        logger.info("Coupling written to %s", path)

    def ulam(self, cfg: ExperimentConfig, map_name: str, boxes: int, samples_per_box: int,
             low: float, high: float):
        """Ulam matrix of a built-in one-dimensional map"""
        maps = {
            "cubic": lambda x: cubic_map(x, tuple(cfg.coefficients)),
            "identity": lambda x: x,
        }
        if map_name not in maps:
            self._fail(InputParseError(f"Unknown map '{map_name}'. Available: {', '.join(maps)}"))

        try:
            grid = UlamGrid.interval(low, high, boxes)
            result = ulam_matrix(maps[map_name], grid, samples_per_box, cfg.seed)
            out = Path(cfg.out_dir)
            write_matrix_csv(out / "ulam_matrix.csv", result.p)
            write_matrix_csv(out / "ulam_escape.csv", result.escape.reshape(-1, 1))
        except (WassregError, ValueError, OSError) as e:
            self._fail(e)

        if not self.quiet:
            self.ui.show_matrix(result.p, f"Ulam matrix ({map_name}, {boxes} boxes)")
        self.ui.print_success(f"Ulam matrix written to {out / 'ulam_matrix.csv'}")

    def edmd(self, cfg: ExperimentConfig, trajectory: Optional[str], dictionary: str, degree: int,
             x0: float, length: int, dmd: bool):
        """EDMD (or plain DMD) on a trajectory file or a cubic-map orbit"""
        try:
            if trajectory is not None:
                states = load_trajectory(trajectory)
            else:
                if length < 2:
                    raise InputParseError(f"Orbit length must be at least 2, got {length}")
                orbit = [x0]
                for _ in range(length - 1):
                    orbit.append(float(cubic_map(orbit[-1], tuple(cfg.coefficients))))
                states = np.array(orbit).reshape(-1, 1)

            if dmd:
                matrix, name = dmd_least_squares(states), "dmd_matrix.csv"
            else:
                if dictionary == "coordinates":
                    observables = coordinate_dictionary(states.shape[1])
                elif dictionary == "monomials":
                    if states.shape[1] != 1:
                        raise InputParseError("The monomial dictionary needs one-dimensional states")
                    observables = monomial_dictionary(degree)
                else:
                    raise InputParseError(f"Unknown dictionary '{dictionary}'. Available: coordinates, monomials")
                matrix, name = edmd_fit(states, observables), "edmd_matrix.csv"

            path = write_matrix_csv(Path(cfg.out_dir) / name, matrix)
        except (WassregError, ValueError, OSError) as e:
            self._fail(e)

        if not self.quiet:
            self.ui.show_matrix(matrix, "DMD matrix" if dmd else "EDMD matrix")
        self.ui.print_success(f"Matrix written to {path}")
