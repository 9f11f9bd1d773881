import numpy as np
import pytest

from nsdeblur.linalg import pseudo_inverse, solve_least_squares, sym_eigen


def test_identity_system_returns_rhs():
    b = np.array([3.0, -1.0, 2.0])
    np.testing.assert_allclose(solve_least_squares(np.eye(3), b), b)


def test_overdetermined_mean():
    x = solve_least_squares(np.array([[1.0], [1.0]]), np.array([0.0, 2.0]))
    assert x[0] == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(3))
def test_recovers_constructed_solution(seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((20, 6))
    x0 = rng.standard_normal(6)
    x = solve_least_squares(m, m @ x0)
    np.testing.assert_allclose(x, x0, atol=1e-8)


def test_residual_orthogonal_to_columns():
    rng = np.random.default_rng(5)
    m = rng.standard_normal((15, 4))
    b = rng.standard_normal(15)
    x = solve_least_squares(m, b)
    assert np.abs(m.T @ (m @ x - b)).max() < 1e-8


def test_rank_deficient_warns_and_returns_min_norm():
    m = np.array([[1.0, 1.0], [1.0, 1.0]])
    with pytest.warns(RuntimeWarning):
        x = solve_least_squares(m, np.array([2.0, 2.0]))
    np.testing.assert_allclose(x, [1.0, 1.0], atol=1e-12)


def test_ridge_shrinks_solution():
    rng = np.random.default_rng(6)
    m = rng.standard_normal((12, 3))
    b = rng.standard_normal(12)
    plain = solve_least_squares(m, b)
    ridged = solve_least_squares(m, b, ridge=10.0)
    assert np.linalg.norm(ridged) < np.linalg.norm(plain)


def test_eigen_diagonal():
    eig = sym_eigen(np.diag([3.0, 1.0]))
    np.testing.assert_allclose(eig.values, [3.0, 1.0])
    np.testing.assert_allclose(np.abs(eig.vectors), np.eye(2), atol=1e-12)


def test_eigen_textbook_pair():
    eig = sym_eigen(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(eig.values, [3.0, 1.0])
    np.testing.assert_allclose(np.abs(eig.vectors[:, 0]),
                               [1 / np.sqrt(2)] * 2)


@pytest.mark.parametrize("seed", range(3))
def test_eigen_reconstruction_and_trace(seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((10, 10))
    b = g.T @ g
    eig = sym_eigen(b)
    recon = eig.vectors @ np.diag(eig.values) @ eig.vectors.T
    assert np.linalg.norm(recon - b) <= 1e-8 * np.linalg.norm(b)
    assert np.sum(eig.values) == pytest.approx(np.trace(b), rel=1e-8)
    assert eig.values.min() >= -1e-10 * np.abs(b).max()
    ortho = eig.vectors.T @ eig.vectors
    assert np.abs(ortho - np.eye(10)).max() < 1e-10


def test_eigen_rejects_asymmetric():
    with pytest.raises(ValueError):
        sym_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_pinv_of_invertible_is_inverse():
    m = np.array([[2.0, 1.0], [1.0, 3.0]])
    np.testing.assert_allclose(pseudo_inverse(m), np.linalg.inv(m),
                               atol=1e-12)


def test_pinv_of_zero_is_zero():
    np.testing.assert_array_equal(pseudo_inverse(np.zeros((3, 2))),
                                  np.zeros((2, 3)))


def test_pinv_penrose_identities_on_low_rank():
    rng = np.random.default_rng(9)
    m = rng.standard_normal((4, 2)) @ rng.standard_normal((2, 3))
    p = pseudo_inverse(m)
    np.testing.assert_allclose(m @ p @ m, m, atol=1e-8)
    np.testing.assert_allclose(p @ m @ p, p, atol=1e-8)
    np.testing.assert_allclose((m @ p).T, m @ p, atol=1e-8)
    np.testing.assert_allclose((p @ m).T, p @ m, atol=1e-8)
