"""
Experiment Runner
Builds snapshots, runs fits, and writes plot-ready outputs for one config
"""

import time
from datetime import datetime
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from wassreg.config import get_logger
from wassreg.errors import InputParseError
from wassreg.fitting import (
    BasisModel,
    FitTrace,
    averaged_monge_init,
    fit_basis_empirical,
    fit_linear_gaussian,
    rollout_gaussian,
)
from wassreg.measures import (
    EmpiricalMeasure,
    GaussianMeasure,
    ar1_covariance_sequence,
    ar1_sample_trajectories,
    cubic_map,
    cubic_snapshots,
    ellipse_polyline,
    empirical_pushforward,
)
from wassreg.transport import solve_discrete_ot
from .artifact import RunArtifact
from .config import ExperimentConfig
from .storage import load_snapshots, save_snapshots, write_csv, write_json


logger = get_logger(__name__)

ELLIPSE_POINTS = 128
ELLIPSE_LEVELS = (1.0, 2.0)
ELLIPSE_ITERATES = 8
CURVE_POINTS = 200
DENSITY_BINS = 50


def matrix_columns(d: int) -> List[str]:
    return [f"a{i + 1}{j + 1}" for i in range(d) for j in range(d)]


def theta_columns(p: int) -> List[str]:
    return [f"theta{k + 1}" for k in range(p)]


def write_trace_csv(path: Path, trace: FitTrace, param_columns: Sequence[str]) -> Path:
    """iter,cost,grad_norm followed by one column per parameter"""
    rows = ([r.iteration, r.objective, r.grad_norm, *r.params] for r in trace.records)
    return write_csv(path, ["iter", "cost", "grad_norm", *param_columns], rows)


class ExperimentRunner:
    """
    Runs the built-in experiments and custom snapshot fits
    """

    def __init__(self, cfg: ExperimentConfig):
        """
        Initialize experiment runner

        Args:
            cfg: Resolved experiment configuration
        """
        self.cfg = cfg
        self.out_dir = Path(cfg.out_dir)

    # ------------------------------------------------------------------
    # Snapshot generation
    # ------------------------------------------------------------------

    def ar1_snapshots(self):
        """Exact Gaussian sequence, or empirical clouds when n_samples is set"""
        ar1 = self.cfg.ar1_config(noise=self.cfg.noise_scale > 0.0)
        if self.cfg.n_samples is not None:
            return ar1_sample_trajectories(ar1, self.cfg.n_samples, self.cfg.seed)
        return ar1_covariance_sequence(ar1)

    def cubic_snapshots(self) -> List[EmpiricalMeasure]:
        return cubic_snapshots(
            n=self.cfg.grid_size,
            steps=self.cfg.cubic_steps,
            sampling=self.cfg.sampling,
            seed=self.cfg.seed,
            coefficients=tuple(self.cfg.coefficients),
        )

    def simulate_ar1(self, path: Optional[Path] = None) -> Path:
        """Write the AR(1) snapshot sequence to JSON"""
        target = path or self.out_dir / "snapshots.json"
        snapshots = self.ar1_snapshots()
        save_snapshots(target, snapshots)
        logger.info("Wrote %d snapshots to %s", len(snapshots), target)
        return target

    # ------------------------------------------------------------------
    # Fits
    # ------------------------------------------------------------------

    def _start(self):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        write_json(self.out_dir / "config.json", self.cfg.model_dump(mode="json"))
        return datetime.now().isoformat(), time.time()

    def _finish(self, command: str, trace: FitTrace, params, initial, snapshots, files, started_at, t0) -> RunArtifact:
        files = ["config.json", *files, "artifact.json"]
        artifact = RunArtifact.from_trace(
            command, self.cfg.model_dump(mode="json"), trace, params, initial,
            snapshots, files, started_at, time.time() - t0,
        )
        write_json(self.out_dir / "artifact.json", artifact.model_dump(mode="json"))
        return artifact

    def fit_gaussian(self, snapshots_path: Optional[str] = None) -> RunArtifact:
        """
        Linear fit on Gaussian snapshots

        Reads snapshots from a file when given, otherwise generates the AR(1)
        sequence. Point-cloud snapshots are moment-matched first.
        """
        if snapshots_path is not None:
            snapshots = load_snapshots(snapshots_path)
        else:
            snapshots = self.ar1_snapshots()
        gaussians = [m if isinstance(m, GaussianMeasure) else GaussianMeasure.from_empirical(m)
                     for m in snapshots]
        if len(gaussians) < 2:
            raise InputParseError(f"Need at least 2 snapshots, got {len(gaussians)}", snapshots_path)

        started_at, t0 = self._start()
        covs = [g.cov for g in gaussians]
        d = gaussians[0].dim
        a_init = averaged_monge_init(covs) if self.cfg.init == "average" else np.eye(d)

        a, trace = fit_linear_gaussian(covs, self.cfg.descent, a_init)

        files = [write_trace_csv(self.out_dir / "trace.csv", trace, matrix_columns(d)).name]
        if d == 2:
            files.append(self._write_ellipses(trace, gaussians).name)
        else:
            logger.info("Skipping ellipses.csv for d=%d", d)

        return self._finish("fit-gaussian", trace, a.ravel(), a_init.ravel(), gaussians, files, started_at, t0)

    def _write_ellipses(self, trace: FitTrace, gaussians: Sequence[GaussianMeasure]) -> Path:
        """Contours of A_n#mu_1 and A_n#A_n#mu_1 for the first iterates, plus the targets"""
        rows = []

        def add(curve: str, iterate, g: GaussianMeasure):
            for level in ELLIPSE_LEVELS:
                for k, (x, y) in enumerate(ellipse_polyline(g, level, ELLIPSE_POINTS)):
                    rows.append([curve, iterate, level, k, x, y])

        d = gaussians[0].dim
        for record in trace.records[:ELLIPSE_ITERATES]:
            a = np.asarray(record.params).reshape(d, d)
            one, two = rollout_gaussian(a, gaussians[0], 2)
            add("one-step", record.iteration + 1, one)
            add("two-step", record.iteration + 1, two)
        for i, g in enumerate(gaussians[1:3], start=2):
            add(f"target-{i}", "", g)

        return write_csv(self.out_dir / "ellipses.csv", ["curve", "iterate", "level", "point", "x", "y"], rows)

    def fit_empirical(self, snapshots_path: Optional[str] = None) -> RunArtifact:
        """
        Basis-model fit on point-cloud snapshots

        Reads snapshots from a file when given, otherwise uses the cubic generator.
        """
        if snapshots_path is not None:
            snapshots = load_snapshots(snapshots_path)
            if not all(isinstance(m, EmpiricalMeasure) for m in snapshots):
                raise InputParseError("fit-empirical needs point-cloud snapshots", snapshots_path)
        else:
            snapshots = self.cubic_snapshots()
        if len(snapshots) < 2:
            raise InputParseError(f"Need at least 2 snapshots, got {len(snapshots)}", snapshots_path)

        basis = self.cfg.basis_family(dim=snapshots[0].dim)
        theta_init = self.cfg.theta_init
        if theta_init is not None and len(theta_init) != basis.n_params:
            logger.info("theta_init has %d entries but %s needs %d; using the family identity",
                        len(theta_init), basis.name, basis.n_params)
            theta_init = None
        if theta_init is None:
            identity = basis.identity_theta()
            theta_init = identity if identity is not None else np.zeros(basis.n_params)
        theta_init = np.asarray(theta_init, dtype=float)

        started_at, t0 = self._start()
        theta, trace = fit_basis_empirical(snapshots, basis, self.cfg.descent, theta_init)

        files = [write_trace_csv(self.out_dir / "trace.csv", trace, theta_columns(basis.n_params)).name]
        if basis.dim == 1 and trace.records:
            selected = self.cfg.selected_iterations(trace.final.iteration)
            models = [(i, BasisModel(theta=trace.params_at(i), basis=basis)) for i in selected]
            coefficients = tuple(self.cfg.coefficients) if snapshots_path is None else None
            files.append(self._write_map_curves(models, snapshots, coefficients).name)
            files.append(self._write_densities(models, snapshots).name)
        else:
            logger.info("Skipping map curves and densities for d=%d", basis.dim)

        return self._finish("fit-empirical", trace, theta, theta_init, snapshots, files, started_at, t0)

    def _write_map_curves(self, models, snapshots: Sequence[EmpiricalMeasure], coefficients=None) -> Path:
        """
        Fitted maps S(.; theta_n) on [0, 1] with two reference curves

        "monge" is the barycentric image of the optimal plan from mu_1 to mu_2
        at the points of mu_1; "target" is the generating cubic, written only
        when the snapshots came from it.
        """
        x = np.linspace(0.0, 1.0, CURVE_POINTS)
        rows = []
        for iteration, model in models:
            for xi, si in zip(x, model.evaluate(x.reshape(-1, 1))[:, 0]):
                rows.append([iteration, xi, si])

        if coefficients is not None:
            rows.extend(["target", xi, si] for xi, si in zip(x, cubic_map(x, coefficients)))

        source, target = snapshots[0], snapshots[1]
        images = solve_discrete_ot(source, target).barycentric_map(target.points)[:, 0]
        order = np.argsort(source.points[:, 0], kind="stable")
        rows.extend(["monge", source.points[k, 0], images[k]] for k in order)

        return write_csv(self.out_dir / "map_curves.csv", ["iteration", "x", "value"], rows)

    def _write_densities(self, models, snapshots: Sequence[EmpiricalMeasure]) -> Path:
        """Histogram of S(.; theta_n)#mu_1 per selected iteration and of mu_2"""
        clouds = [(str(i), empirical_pushforward(snapshots[0], m.evaluate)) for i, m in models]
        clouds.append(("target", snapshots[1]))

        lo = min(float(c.points.min()) for _, c in clouds)
        hi = max(float(c.points.max()) for _, c in clouds)
        if hi <= lo:
            lo, hi = lo - 0.5, hi + 0.5

        rows = []
        for label, cloud in clouds:
            density, edges = np.histogram(cloud.points[:, 0], bins=DENSITY_BINS, range=(lo, hi),
                                          weights=cloud.weights, density=True)
            for left, right, value in zip(edges[:-1], edges[1:], density):
                rows.append([label, left, right, value])
        return write_csv(self.out_dir / "densities.csv", ["iteration", "bin_left", "bin_right", "density"], rows)
