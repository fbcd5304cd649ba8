"""
Unit Tests for SPD Matrix Kernels
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from wassreg.errors import NearSingularError, NotPSDError, NotSymmetricError
from wassreg.linalg import (
    condition_estimate,
    inverse,
    inv_sqrt_spd,
    is_psd,
    sqrt_product,
    sqrt_spd,
    sym_eig,
)


def random_spd(rng, d, max_condition=1e6):
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    lam = np.exp(rng.uniform(0.0, np.log(max_condition), size=d))
    lam[0] = 1.0
    return (q * lam) @ q.T


def rel_err(x, y):
    return np.linalg.norm(x - y) / max(np.linalg.norm(y), 1e-300)


def test_sym_eig_examples():
    """Eigenvalues come back ascending"""
    np.testing.assert_allclose(sym_eig(np.eye(2)).eigenvalues, [1.0, 1.0])

    eig = sym_eig(np.diag([1.0, 4.0]))
    np.testing.assert_allclose(eig.eigenvalues, [1.0, 4.0])
    np.testing.assert_allclose(np.abs(eig.eigenvectors), np.eye(2), atol=1e-12)

    np.testing.assert_allclose(sym_eig([[2.0, 1.0], [1.0, 2.0]]).eigenvalues, [1.0, 3.0], atol=1e-12)


def test_sym_eig_invariants():
    """Reconstruction and orthogonality"""
    rng = np.random.default_rng(1)
    for d in (1, 2, 3, 5):
        s = random_spd(rng, d, 1e3)
        eig = sym_eig(s)
        v = eig.eigenvectors
        assert np.max(np.abs(eig.reconstruct() - s)) <= 1e-10 * (1 + np.max(np.abs(s)))
        assert np.max(np.abs(v.T @ v - np.eye(d))) <= 1e-10


def test_sym_eig_rejects_asymmetric():
    with pytest.raises(NotSymmetricError):
        sym_eig([[1.0, 0.5], [0.0, 1.0]])


def test_sqrt_spd_examples():
    np.testing.assert_allclose(sqrt_spd(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(sqrt_spd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-12)

    s = np.array([[2.0, 1.0], [1.0, 2.0]])
    r = sqrt_spd(s)
    np.testing.assert_allclose(r @ r, s, atol=1e-12)
    np.testing.assert_allclose(np.linalg.eigvalsh(r), [1.0, np.sqrt(3.0)], atol=1e-12)


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_sqrt_spd_squares_back(d):
    rng = np.random.default_rng(10 + d)
    for _ in range(10):
        s = random_spd(rng, d)
        r = sqrt_spd(s)
        assert rel_err(r @ r, s) <= 1e-9
        np.testing.assert_allclose(r, r.T)


def test_sqrt_spd_clamps_roundoff_and_rejects_negative():
    """Tiny negative eigenvalues are clamped, clearly negative ones raise"""
    almost = np.diag([1.0, -1e-14])
    np.testing.assert_allclose(sqrt_spd(almost), np.diag([1.0, 0.0]))
    assert is_psd(almost)

    with pytest.raises(NotPSDError) as info:
        sqrt_spd(np.diag([1.0, -1e-3]))
    assert info.value.min_eigenvalue == pytest.approx(-1e-3)
    assert not is_psd(np.diag([1.0, -1e-3]))


def test_sqrt_product_examples():
    np.testing.assert_allclose(sqrt_product(np.eye(2), np.eye(2)), np.eye(2), atol=1e-12)
    np.testing.assert_allclose(sqrt_product(np.diag([4.0, 1.0]), np.diag([9.0, 1.0])),
                               np.diag([6.0, 1.0]), atol=1e-12)


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_sqrt_product_properties(d):
    """M @ M = C B and trace matches the symmetric form"""
    rng = np.random.default_rng(20 + d)
    for _ in range(10):
        c = random_spd(rng, d)
        b = random_spd(rng, d)
        m = sqrt_product(c, b)
        assert rel_err(m @ m, c @ b) <= 1e-8

        c_half = sqrt_spd(c)
        assert np.trace(m) == pytest.approx(np.trace(sqrt_spd(c_half @ b @ c_half)), rel=1e-9)


def test_sqrt_product_singular_c():
    with pytest.raises(NearSingularError):
        sqrt_product(np.diag([1.0, 0.0]), np.eye(2))


def test_inv_sqrt_spd():
    np.testing.assert_allclose(inv_sqrt_spd(np.diag([4.0, 0.25])), np.diag([0.5, 2.0]), atol=1e-12)


def test_inverse_and_condition():
    np.testing.assert_allclose(inverse(np.eye(2)), np.eye(2))
    assert condition_estimate(np.eye(2)) == pytest.approx(1.0)

    a = np.array([[-0.5, 2.0], [-1.0, 1.5]])
    np.testing.assert_allclose(a @ inverse(a), np.eye(2), atol=1e-8)

    with pytest.raises(NearSingularError) as info:
        inverse(np.diag([1.0, 1e-13]))
    assert info.value.condition == pytest.approx(1e13)

    assert condition_estimate(np.zeros((2, 2))) == float("inf")
    assert condition_estimate(np.array([[np.nan, 0.0], [0.0, 1.0]])) == float("inf")


def test_condition_estimate_tracks_true_condition():
    rng = np.random.default_rng(3)
    for d in (2, 3, 4):
        a = rng.standard_normal((d, d))
        true = np.linalg.cond(a, 2)
        est = condition_estimate(a)
        assert true / d <= est <= true * d


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
