"""
Unit Tests for Wasserstein Regression Fits
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from wassreg.baselines import dmd_least_squares
from wassreg.errors import DimensionMismatchError
from wassreg.fitting import (
    AffineBasis,
    BasisFamilies,
    BasisModel,
    DescentConfig,
    LinearBasis,
    ShiftedMonomialBasis,
    affine_basis,
    averaged_monge_init,
    custom_basis,
    empirical_cost,
    empirical_gradient,
    fit_basis_empirical,
    fit_linear_gaussian,
    gaussian_cost,
    gaussian_gradient,
    gaussian_objective,
    linear_basis,
    pair_coupling,
    predict_sequence,
    pseudo_metric,
    shifted_monomials_basis,
)
from wassreg.measures import (
    CUBIC_COEFFICIENTS,
    AR1_A0,
    Ar1Config,
    EmpiricalMeasure,
    GaussianMeasure,
    ar1_covariance_sequence,
    cubic_snapshots,
    dirac_sequence,
    gaussian_pushforward_linear,
    uniform_grid_1d,
)
from wassreg.transport import monge_map_gaussian, w2_empirical, w2_squared_gaussian


def random_spd(rng, d):
    m = rng.standard_normal((d, d))
    return m @ m.T + 0.3 * np.eye(d)


def planar_covs(noise=True):
    return [g.cov for g in ar1_covariance_sequence(Ar1Config.planar_default(noise=noise))]


def central_differences(fn, x, h):
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        step = np.zeros_like(x)
        step[idx] = h
        grad[idx] = (fn(x + step) - fn(x - step)) / (2 * h)
    return grad


# ----------------------------------------------------------------------------
# Basis models
# ----------------------------------------------------------------------------

def test_linear_basis_reproduces_matrix():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((3, 3))
    x = rng.standard_normal((7, 3))
    model = BasisModel.linear(a)
    np.testing.assert_allclose(model(x), x @ a.T, atol=1e-14)
    np.testing.assert_allclose(model.basis.to_matrix(model.theta), a)


def test_basis_families_registry():
    assert set(BasisFamilies.list_families()) >= {"linear", "affine", "shifted-monomials-1d"}
    assert isinstance(BasisFamilies.create("affine", dim=2), AffineBasis)
    mono = BasisFamilies.create("shifted-monomials-1d", exponents=(3, 1, 0))
    assert mono.n_params == 3
    np.testing.assert_allclose(mono.identity_theta(), [0.0, -1.0, 1.0])

    with pytest.raises(ValueError):
        BasisFamilies.create("chebyshev")

    BasisFamilies.register("linear-copy", LinearBasis)
    try:
        assert BasisFamilies.create("linear-copy", dim=2).n_params == 4
    finally:
        BasisFamilies._families.pop("linear-copy")

    with pytest.raises(TypeError):
        BasisFamilies.register("bogus", dict)


def test_family_factories():
    assert isinstance(linear_basis(3), LinearBasis) and linear_basis(3).n_params == 9

    affine = affine_basis(2)
    model = BasisModel(theta=affine.identity_theta() + np.array([0, 0, 0, 0, 1.0, -1.0]), basis=affine)
    np.testing.assert_allclose(model(np.array([[0.5, 0.5]])), [[1.5, -0.5]])

    mono = shifted_monomials_basis((2, 0), shift=2.0)
    np.testing.assert_allclose(mono.design(np.array([[0.5]]))[0], [[2.25, 1.0]])
    assert mono.identity_theta() is None

    with pytest.raises(ValueError):
        shifted_monomials_basis((1.5,))


def test_shifted_monomials_match_cubic():
    basis = ShiftedMonomialBasis((3, 1, 0))
    model = BasisModel(theta=CUBIC_COEFFICIENTS, basis=basis)
    np.testing.assert_allclose(model(np.array([[0.5]])), [[0.9]], atol=1e-15)

    identity = BasisModel(theta=basis.identity_theta(), basis=basis)
    x = uniform_grid_1d(9).points
    np.testing.assert_allclose(identity(x), x, atol=1e-15)


def test_basis_model_checks():
    with pytest.raises(ValueError):
        BasisModel(theta=[1.0, 2.0], basis=LinearBasis(2))
    with pytest.raises(DimensionMismatchError):
        LinearBasis(2).design(np.zeros((3, 3)))

    bad = custom_basis(lambda p: np.full((p.shape[0], 1, 1), np.inf), dim=1, n_params=1)
    with pytest.raises(ValueError):
        bad.design(np.zeros((2, 1)))


# ----------------------------------------------------------------------------
# Gaussian objective
# ----------------------------------------------------------------------------

def test_gaussian_cost_zero_on_generating_matrix():
    covs = planar_covs(noise=False)
    assert gaussian_cost(AR1_A0, covs) <= 1e-10
    np.testing.assert_allclose(gaussian_gradient(AR1_A0, covs), 0.0, atol=1e-8)


def test_gaussian_gradient_commuting_case():
    np.testing.assert_allclose(gaussian_gradient(np.eye(2), [np.eye(2), 4 * np.eye(2)]), -2 * np.eye(2), atol=1e-12)

    cost, grad = gaussian_objective(np.eye(2), [np.eye(2), 4 * np.eye(2)])
    assert cost == pytest.approx(2.0)
    np.testing.assert_allclose(grad, -2 * np.eye(2), atol=1e-12)


def test_gaussian_gradient_matches_finite_differences():
    """50 random instances, d in {1, 2, 3}, m in {2, ..., 6}"""
    rng = np.random.default_rng(11)
    for k in range(50):
        d = 1 + k % 3
        m = 2 + k % 5
        covs = [random_spd(rng, d) for _ in range(m)]
        a = np.eye(d) + 0.4 * rng.standard_normal((d, d))
        while np.linalg.cond(a) > 1e3:
            a = np.eye(d) + 0.4 * rng.standard_normal((d, d))

        analytic = gaussian_gradient(a, covs)
        numeric = central_differences(lambda x: gaussian_cost(x, covs), a, 1e-5)
        assert np.max(np.abs(analytic - numeric)) <= 1e-5 * max(1.0, np.max(np.abs(numeric)))


def test_gaussian_cost_needs_two_snapshots():
    with pytest.raises(ValueError):
        gaussian_cost(np.eye(2), [np.eye(2)])
    with pytest.raises(DimensionMismatchError):
        gaussian_cost(np.eye(3), [np.eye(2), np.eye(2)])


# ----------------------------------------------------------------------------
# Empirical objective
# ----------------------------------------------------------------------------

def test_empirical_cost_examples():
    e = EmpiricalMeasure.uniform(np.random.default_rng(2).standard_normal((6, 2)))
    identity = BasisModel.linear(np.eye(2))
    assert empirical_cost(identity, [e, e]) == 0.0

    a = np.array([[1.0, 2.0], [0.5, -1.0]])
    x1, x2 = np.array([1.0, -1.0]), np.array([0.3, 0.7])
    model = BasisModel.linear(a)
    seq = dirac_sequence([x1, x2])
    residual = a @ x1 - x2
    assert empirical_cost(model, seq) == pytest.approx(residual @ residual)
    np.testing.assert_allclose(empirical_gradient(model, seq), (2 * np.outer(residual, x1)).ravel())


def test_empirical_generative_zero():
    snapshots = cubic_snapshots(n=100)
    model = BasisModel(theta=CUBIC_COEFFICIENTS, basis=ShiftedMonomialBasis((3, 1, 0)))
    assert empirical_cost(model, snapshots) <= 1e-12
    np.testing.assert_allclose(empirical_gradient(model, snapshots), 0.0, atol=1e-10)


def _plan_stable(model, snapshots, theta, h):
    """Optimal assignments do not change under +-h perturbations of every coordinate"""
    base = [pair_coupling(model, s, t)[1].assignment() for s, t in zip(snapshots, snapshots[1:])]
    for idx in range(theta.size):
        for sign in (-1.0, 1.0):
            shifted = theta.copy()
            shifted[idx] += sign * h
            nudged = model.with_theta(shifted)
            for b, (s, t) in zip(base, zip(snapshots, snapshots[1:])):
                if not np.array_equal(pair_coupling(nudged, s, t)[1].assignment(), b):
                    return False
    return True


@pytest.mark.parametrize("d", [1, 2])
def test_empirical_gradient_matches_finite_differences(d):
    rng = np.random.default_rng(100 + d)
    checked = 0
    while checked < 10:
        n = int(rng.integers(5, 31))
        snapshots = [EmpiricalMeasure.uniform(rng.uniform(size=(n, d))) for _ in range(3)]
        basis = ShiftedMonomialBasis((3, 1, 0)) if d == 1 else LinearBasis(2)
        theta = rng.standard_normal(basis.n_params)
        model = BasisModel(theta=theta, basis=basis)

        h = 1e-6
        if not _plan_stable(model, snapshots, theta, h):
            continue
        analytic = empirical_gradient(model, snapshots)
        numeric = central_differences(lambda t: empirical_cost(model.with_theta(t), snapshots), theta, h)
        assert np.max(np.abs(analytic - numeric)) <= 1e-4 * max(1.0, np.max(np.abs(numeric)))
        checked += 1


def test_dirac_gradient_vanishes_at_dmd_solution():
    """All-Dirac snapshots reduce the linear fit to least-squares DMD"""
    trajectory = _spiral_trajectory()
    a_dmd = dmd_least_squares(trajectory)
    grad = empirical_gradient(BasisModel.linear(a_dmd), dirac_sequence(trajectory))
    assert np.linalg.norm(grad) <= 1e-8


# ----------------------------------------------------------------------------
# Descent
# ----------------------------------------------------------------------------

def test_planar_ar1_fit():
    """Planar AR(1) with alpha = 0.1 from the identity"""
    covs = planar_covs()
    cfg = DescentConfig(step=0.1, max_iters=2000, grad_tol=1e-6)
    a, trace = fit_linear_gaussian(covs, cfg, np.eye(2))

    assert trace.status == "converged"
    objectives = trace.objectives()
    assert np.all(np.diff(objectives[:9]) < 0)

    assert objectives[-1] <= gaussian_cost(AR1_A0, covs)
    assert trace.final.grad_norm / (len(covs) - 1) < 1e-6
    np.testing.assert_allclose(a, trace.params_at(trace.final.iteration).reshape(2, 2))

    a_avg, trace_avg = fit_linear_gaussian(covs, cfg, averaged_monge_init(covs))
    assert trace_avg.status == "converged"
    assert trace_avg.final.objective == pytest.approx(objectives[-1], rel=1e-4)


def test_trace_holds_summed_objective():
    """Records carry F and |grad F|; only the step is divided by m - 1"""
    covs = planar_covs()
    _, trace = fit_linear_gaussian(covs, DescentConfig(step=0.1, max_iters=2), np.eye(2))

    first = trace.records[0]
    assert first.objective == pytest.approx(gaussian_cost(np.eye(2), covs), rel=1e-12)
    assert first.objective == pytest.approx(11.56, abs=0.01)
    assert first.grad_norm == pytest.approx(np.linalg.norm(gaussian_gradient(np.eye(2), covs)), rel=1e-12)

    a1 = trace.params_at(1).reshape(2, 2)
    expected = np.eye(2) - 0.1 / (len(covs) - 1) * gaussian_gradient(np.eye(2), covs)
    np.testing.assert_allclose(a1, expected, rtol=1e-10, atol=1e-12)
    assert trace.records[1].objective == pytest.approx(gaussian_cost(a1, covs), rel=1e-12)


def test_noise_free_recovery():
    covs = planar_covs(noise=False)
    start = AR1_A0 + 0.05 * np.ones((2, 2))
    _, trace = fit_linear_gaussian(covs, DescentConfig(step=0.1, max_iters=2000, grad_tol=1e-6), start)
    assert trace.status == "converged"
    assert trace.final.objective <= 1e-8
    assert trace.final.grad_norm / (len(covs) - 1) <= 1e-6


def test_fit_from_truth_stops_immediately():
    covs = planar_covs(noise=False)
    a, trace = fit_linear_gaussian(covs, DescentConfig(grad_tol=1e-6), AR1_A0)
    assert trace.status == "converged"
    assert trace.n_iterations == 1
    np.testing.assert_allclose(a, AR1_A0)


def test_raw_sum_with_backtracking_is_monotone():
    """The summed objective overshoots with a fixed step; the line search keeps it descending"""
    covs = planar_covs()
    _, fixed = fit_linear_gaussian(covs, DescentConfig(step=0.1, max_iters=3, reduction="sum"), np.eye(2))
    assert fixed.objectives()[1] > fixed.objectives()[0]

    cfg = DescentConfig(step=0.1, max_iters=60, reduction="sum", backtracking=True)
    _, trace = fit_linear_gaussian(covs, cfg, np.eye(2))
    assert trace.status in ("converged", "max-iters")
    assert np.all(np.diff(trace.objectives()) <= 0)
    assert all(r.step is not None and r.step <= 0.1 for r in trace.records[:-1])


def test_singular_start_reports_error():
    a, trace = fit_linear_gaussian(planar_covs(), DescentConfig(), np.ones((2, 2)))
    assert trace.status == "error"
    assert "singular" in trace.message
    assert trace.n_iterations == 0
    np.testing.assert_allclose(a, np.ones((2, 2)))


def test_zero_iterations_keeps_initial_state():
    theta, trace = fit_basis_empirical(cubic_snapshots(n=20), ShiftedMonomialBasis(), DescentConfig(max_iters=0),
                                       [-2.0, 0.0, 2.0])
    assert trace.n_iterations == 1
    assert trace.status == "max-iters"
    np.testing.assert_allclose(theta, [-2.0, 0.0, 2.0])


def test_cubic_fit_from_far_start():
    """Grid of 200 points, theta from (-2, 0, 2)"""
    snapshots = cubic_snapshots(n=200)
    cfg = DescentConfig(step=0.1, max_iters=1000, grad_tol=1e-6)
    theta, trace = fit_basis_empirical(snapshots, ShiftedMonomialBasis((3, 1, 0)), cfg, [-2.0, 0.0, 2.0])

    assert trace.status != "error"
    np.testing.assert_allclose(theta, CUBIC_COEFFICIENTS, atol=0.05)
    assert trace.final.objective < trace.records[0].objective


def test_cubic_fit_from_truth_converges_at_once():
    snapshots = cubic_snapshots(n=100)
    _, trace = fit_basis_empirical(snapshots, ShiftedMonomialBasis(), DescentConfig(), CUBIC_COEFFICIENTS)
    assert trace.status == "converged"
    assert trace.n_iterations == 1


def test_model_blowup_ends_with_error_status():
    basis = custom_basis(lambda p: np.where(p > 0.5, np.inf, 1.0)[:, :, None], dim=1, n_params=1)
    _, trace = fit_basis_empirical(cubic_snapshots(n=10), basis, DescentConfig(), [1.0])
    assert trace.status == "error"


def test_workers_do_not_change_results():
    snapshots = cubic_snapshots(n=30, steps=4)
    runs = []
    for workers in (1, 3):
        cfg = DescentConfig(step=0.05, max_iters=25, workers=workers, record_plans=True)
        theta, trace = fit_basis_empirical(snapshots, ShiftedMonomialBasis(), cfg, [-2.0, 0.0, 2.0])
        runs.append((theta, trace))

    np.testing.assert_array_equal(runs[0][0], runs[1][0])
    assert runs[0][1].objectives().tobytes() == runs[1][1].objectives().tobytes()
    assert runs[0][1].records[3].plans == runs[1][1].records[3].plans
    assert len(runs[0][1].records[0].plans) == 3


def _spiral_trajectory():
    rng = np.random.default_rng(5)
    angle = 0.6
    b = 0.97 * np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    states = [np.array([1.0, 0.2])]
    for _ in range(9):
        states.append(b @ states[-1] + 0.05 * rng.standard_normal(2))
    return np.array(states)


def test_dirac_fit_converges_to_dmd():
    trajectory = _spiral_trajectory()
    a_dmd = dmd_least_squares(trajectory)

    x = trajectory[:-1]
    lipschitz = 2.0 / (len(trajectory) - 1) * np.linalg.eigvalsh(x.T @ x)[-1]
    cfg = DescentConfig(step=1.0 / lipschitz, max_iters=3000, grad_tol=1e-12)
    theta, trace = fit_basis_empirical(dirac_sequence(trajectory), LinearBasis(2), cfg)

    assert trace.status != "error"
    np.testing.assert_allclose(theta.reshape(2, 2), a_dmd, atol=1e-6)


# ----------------------------------------------------------------------------
# Pseudo-metric and rollouts
# ----------------------------------------------------------------------------

def test_pseudo_metric_identity_family():
    rng = np.random.default_rng(8)
    e0 = EmpiricalMeasure.uniform(rng.standard_normal((8, 2)))
    e1 = EmpiricalMeasure.uniform(rng.standard_normal((8, 2)))
    assert pseudo_metric(e0, e1, "identity") == pytest.approx(w2_empirical(e0, e1) ** 2)

    g0, g1 = GaussianMeasure.centered(random_spd(rng, 2)), GaussianMeasure.centered(random_spd(rng, 2))
    assert pseudo_metric(g0, g1, "identity") == pytest.approx(w2_squared_gaussian(g0, g1))


def test_pseudo_metric_linear_gaussian_is_zero():
    rng = np.random.default_rng(9)
    g0, g1 = GaussianMeasure.centered(random_spd(rng, 2)), GaussianMeasure.centered(random_spd(rng, 2))
    assert pseudo_metric(g0, g1, "linear", DescentConfig(max_iters=50)) <= 1e-10

    with pytest.raises(ValueError):
        pseudo_metric(GaussianMeasure(mean=[1.0, 0.0], cov=np.eye(2)), g1, "linear")


def test_pseudo_metric_recovers_family_member():
    """mu1 = S0 # mu0 with S0(x) = 0.5 + 2 x in the affine 1-D family"""
    mu0 = uniform_grid_1d(20)
    mu1 = EmpiricalMeasure.uniform(0.5 + 2.0 * mu0.points)
    family = ShiftedMonomialBasis((1, 0))
    value = pseudo_metric(mu0, mu1, family, DescentConfig(step=0.5, max_iters=2000, grad_tol=1e-9))
    assert value <= 1e-10
    assert value <= w2_empirical(mu0, mu1) ** 2


def test_predict_sequence():
    g = GaussianMeasure.standard(2)
    first, second = predict_sequence(AR1_A0, g, 2)
    np.testing.assert_allclose(first.cov, AR1_A0 @ AR1_A0.T)
    np.testing.assert_allclose(second.cov, gaussian_pushforward_linear(first, AR1_A0).cov)

    model = BasisModel(theta=CUBIC_COEFFICIENTS, basis=ShiftedMonomialBasis())
    rolled = predict_sequence(model, uniform_grid_1d(50), 3)
    expected = cubic_snapshots(n=50, steps=4)
    for got, want in zip(rolled, expected[1:]):
        np.testing.assert_allclose(got.points, want.points, atol=1e-12)


def test_averaged_monge_init():
    c = np.array([[2.0, 0.3], [0.3, 1.0]])
    np.testing.assert_allclose(averaged_monge_init([c, c, c]), np.eye(2), atol=1e-12)

    covs = planar_covs()
    t01, _ = monge_map_gaussian(GaussianMeasure.centered(covs[0]), GaussianMeasure.centered(covs[1]))
    np.testing.assert_allclose(averaged_monge_init(covs[:2]), t01)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
