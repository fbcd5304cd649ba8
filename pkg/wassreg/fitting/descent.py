"""
Gradient-Descent Runner
Fixed-step or backtracking descent on the regression objectives
"""

import math
import time
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from wassreg.config import get_logger, settings
from wassreg.errors import NearSingularError, WassregError
from wassreg.linalg import condition_estimate
from wassreg.measures import (
    EmpiricalMeasure,
    GaussianMeasure,
    empirical_pushforward,
    gaussian_pushforward_linear,
)
from wassreg.transport import monge_map_gaussian, w2_empirical, w2_squared_gaussian
from .basis import BasisFamily, BasisModel
from .objectives import as_covariances, empirical_objective, gaussian_cost, gaussian_gradient
from .state import DescentConfig, FitTrace, TraceRecord


logger = get_logger(__name__)

# x -> (objective, gradient, plans or None); raises WassregError on numerical failure
Objective = Callable[[np.ndarray], Tuple[float, np.ndarray, Optional[List[List[int]]]]]


class DescentRunner:
    """
    Runs x_{n+1} = x_n - alpha * scale * grad F(x_n) and records F at every iterate
    """

    def __init__(self, objective: Objective, cfg: DescentConfig, label: str = "fit", scale: float = 1.0):
        """
        Initialize descent runner

        Args:
            objective: Callable returning (value, gradient, plans) of the unscaled F
            cfg: Descent settings
            label: Name used in log messages
            scale: Factor applied to the step and to the gradient-norm stop test
        """
        self.objective = objective
        self.cfg = cfg
        self.label = label
        self.scale = scale

    def _evaluate(self, x: np.ndarray):
        value, grad, plans = self.objective(x)
        if not (math.isfinite(value) and np.all(np.isfinite(grad))):
            raise WassregError(f"Non-finite objective or gradient at iterate (F={value})")
        return value, grad, plans

    def _line_search(self, x: np.ndarray, value: float, grad: np.ndarray):
        """Armijo backtracking; returns (step, x_new, evaluation) or raises"""
        step = self.cfg.step
        # sufficient decrease on scale * F, divided through by scale
        g2 = self.scale * float(np.sum(grad * grad))
        last_error: Optional[Exception] = None
        for _ in range(self.cfg.max_backtracks):
            x_new = x - step * self.scale * grad
            try:
                evaluation = self._evaluate(x_new)
            except WassregError as e:
                last_error = e
            else:
                if evaluation[0] <= value - self.cfg.armijo * step * g2:
                    return step, x_new, evaluation
            step *= self.cfg.shrink
        reason = f" (last failure: {last_error})" if last_error else ""
        raise WassregError(f"Line search found no sufficient decrease{reason}")

    def run(self, x0) -> Tuple[np.ndarray, FitTrace]:
        """
        Descend from x0

        Returns:
            (last successfully evaluated iterate, trace)
        """
        start = time.time()
        trace = FitTrace()
        x = np.array(x0, dtype=float)
        shape = x.shape

        try:
            evaluation = self._evaluate(x)
        except WassregError as e:
            trace.finish("error", str(e))
            logger.info("%s failed at the initial point: %s", self.label, e)
            return x, trace

        iteration = 0
        while True:
            value, grad, plans = evaluation
            grad_norm = float(np.linalg.norm(grad))
            record = TraceRecord(
                iteration=iteration,
                objective=value,
                grad_norm=grad_norm,
                params=x.ravel().tolist(),
                plans=plans if self.cfg.record_plans else None,
            )
            trace.append(record)
            logger.debug("%s iter %d: F=%.6e |grad|=%.3e", self.label, iteration, value, grad_norm)

            if self.scale * grad_norm < self.cfg.grad_tol:
                trace.finish("converged")
                break
            if iteration >= self.cfg.max_iters:
                trace.finish("max-iters")
                break

            try:
                if self.cfg.backtracking:
                    step, x_new, evaluation = self._line_search(x, value, grad)
                else:
                    step = self.cfg.step
                    x_new = x - step * self.scale * grad
                    evaluation = self._evaluate(x_new)
            except WassregError as e:
                trace.finish("error", str(e))
                break

            record.step = step
            x = x_new.reshape(shape)
            iteration += 1

        logger.info(
            "%s finished: status=%s after %d iterate(s), F=%.6e (%.2fs)",
            self.label, trace.status, trace.n_iterations, trace.final.objective, time.time() - start,
        )
        return x, trace


def _scale(reduction: str, n_pairs: int) -> float:
    return 1.0 / n_pairs if reduction == "mean" else 1.0


# ----------------------------------------------------------------------------
# Linear maps on Gaussian snapshots
# ----------------------------------------------------------------------------

def averaged_monge_init(covs) -> np.ndarray:
    """(1/(m-1)) sum_i C_i^{-1} (C_i C_{i+1})^{1/2}, the average of pairwise Monge maps"""
    covs = as_covariances(covs)
    maps = [
        monge_map_gaussian(GaussianMeasure.centered(covs[i]), GaussianMeasure.centered(covs[i + 1]))[0]
        for i in range(len(covs) - 1)
    ]
    return np.mean(maps, axis=0)


def fit_linear_gaussian(covs, cfg: Optional[DescentConfig] = None, a_init=None) -> Tuple[np.ndarray, FitTrace]:
    """
    Fit S(x) = A x to zero-mean Gaussian snapshots

    Args:
        covs: Covariances (or GaussianMeasures) of the snapshots, m >= 2
        cfg: Descent settings
        a_init: Starting matrix (defaults to the identity)

    Returns:
        (A, trace); on a near-singular iterate the trace ends with status
        "error" and A is the last iterate that evaluated cleanly
    """
    cfg = cfg or DescentConfig()
    covs = as_covariances(covs)
    d = covs[0].shape[0]
    a0 = np.eye(d) if a_init is None else np.atleast_2d(np.asarray(a_init, dtype=float))
    scale = _scale(cfg.reduction, len(covs) - 1)

    def objective(a: np.ndarray):
        condition = condition_estimate(a)
        if not math.isfinite(condition) or condition >= settings.condition_limit:
            raise NearSingularError(f"Iterate became near-singular (condition {condition:.3e})", condition)
        return gaussian_cost(a, covs), gaussian_gradient(a, covs), None

    return DescentRunner(objective, cfg, label="fit-gaussian", scale=scale).run(a0)


def rollout_gaussian(a, g: GaussianMeasure, steps: int) -> List[GaussianMeasure]:
    """[A#g, A#A#g, ...] with `steps` entries"""
    out = []
    current = g
    for _ in range(steps):
        current = gaussian_pushforward_linear(current, a)
        out.append(current)
    return out


# ----------------------------------------------------------------------------
# Basis models on empirical snapshots
# ----------------------------------------------------------------------------

def fit_basis_empirical(
    snapshots: Sequence[EmpiricalMeasure],
    basis: BasisFamily,
    cfg: Optional[DescentConfig] = None,
    theta_init=None,
) -> Tuple[np.ndarray, FitTrace]:
    """
    Fit S(x; theta) = Y(x) theta to point-cloud snapshots

    Each evaluation solves one exact OT problem per snapshot pair and uses the
    gradient induced by the resulting plans.

    Args:
        snapshots: Empirical measures sharing one dimension
        basis: Basis family
        cfg: Descent settings
        theta_init: Starting parameters (defaults to the family's identity, else zeros)

    Returns:
        (theta, trace)
    """
    cfg = cfg or DescentConfig()
    if theta_init is None:
        theta_init = basis.identity_theta()
        if theta_init is None:
            theta_init = np.zeros(basis.n_params)
    scale = _scale(cfg.reduction, len(snapshots) - 1)

    def objective(theta: np.ndarray):
        model = BasisModel(theta=theta, basis=basis)
        value, grad, couplings = empirical_objective(model, snapshots, with_gradient=True, workers=cfg.workers)
        plans = [c.assignment().tolist() for c in couplings] if cfg.record_plans else None
        return value, grad, plans

    runner = DescentRunner(objective, cfg, label="fit-empirical", scale=scale)
    return runner.run(np.asarray(theta_init, dtype=float))


def rollout_empirical(model: BasisModel, e: EmpiricalMeasure, steps: int) -> List[EmpiricalMeasure]:
    """[S#e, S#S#e, ...] with `steps` entries"""
    out = []
    current = e
    for _ in range(steps):
        current = empirical_pushforward(current, model.evaluate)
        out.append(current)
    return out


# ----------------------------------------------------------------------------
# Transformation-invariant pseudo-metric
# ----------------------------------------------------------------------------

Family = Union[BasisFamily, str]


def pseudo_metric(
    mu0: Union[EmpiricalMeasure, GaussianMeasure],
    mu1: Union[EmpiricalMeasure, GaussianMeasure],
    family: Family,
    cfg: Optional[DescentConfig] = None,
    theta_init=None,
) -> float:
    """
    inf over S in the family of W2^2(S#mu0, mu1), approximated by a two-snapshot fit

    Args:
        mu0: Source measure
        mu1: Target measure
        family: "identity", "linear" (Gaussian inputs), or a BasisFamily (empirical inputs)
        cfg: Descent settings
        theta_init: Starting parameters (defaults to the family's identity)

    Returns:
        Smallest objective value reached
    """
    gaussian = isinstance(mu0, GaussianMeasure) and isinstance(mu1, GaussianMeasure)

    if isinstance(family, str) and family == "identity":
        if gaussian:
            return w2_squared_gaussian(mu0, mu1)
        return w2_empirical(mu0, mu1) ** 2

    if gaussian:
        if family != "linear" and not (isinstance(family, BasisFamily) and family.name == "linear"):
            raise ValueError("Gaussian inputs support the 'identity' and 'linear' families")
        if np.any(mu0.mean != 0.0) or np.any(mu1.mean != 0.0):
            raise ValueError("The linear Gaussian family assumes zero-mean inputs")
        start = monge_map_gaussian(mu0, mu1)[0] if theta_init is None else theta_init
        _, trace = fit_linear_gaussian([mu0.cov, mu1.cov], cfg, start)
        return float(np.min(trace.objectives())) if trace.records else gaussian_cost(start, [mu0.cov, mu1.cov])

    if isinstance(family, str):
        raise ValueError(f"Empirical inputs need a BasisFamily or 'identity', got '{family}'")

    _, trace = fit_basis_empirical([mu0, mu1], family, cfg, theta_init)
    if not trace.records:
        raise WassregError(f"Pseudo-metric fit failed: {trace.message}")
    return float(np.min(trace.objectives()))


def predict_sequence(model, mu: Union[EmpiricalMeasure, GaussianMeasure], steps: int):
    """
    Iterate a fitted map on a measure

    Args:
        model: d x d matrix (Gaussian measures) or BasisModel (empirical measures)
        mu: Starting measure
        steps: Number of pushforwards

    Returns:
        List of `steps` predicted measures
    """
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    if isinstance(mu, GaussianMeasure):
        a = model.basis.to_matrix(model.theta) if isinstance(model, BasisModel) else model
        return rollout_gaussian(a, mu, steps)
    if not isinstance(model, BasisModel):
        model = BasisModel.linear(model)
    return rollout_empirical(model, mu, steps)
