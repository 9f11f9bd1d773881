import numpy as np
import pytest

import nsdeblur as nd
from conftest import embed, ncc
from nsdeblur.config import STOP_GATE, OptimizerConfig
from nsdeblur.errors import DimensionError
from nsdeblur.psf import spectrum_coefficients
from nsdeblur.surface import surface_area


@pytest.fixture(scope="module")
def small_basis():
    img = nd.texture((96, 96), seed=21)
    return nd.compute_cns(nd.build_operator(nd.estimate_ar(img, 9, 9), 5, 5))


def test_constant_image_gives_zero_stats(small_basis):
    stats = nd.gradient_stats(np.full((96, 96), 0.4), small_basis)
    np.testing.assert_allclose(stats.rho, 0.0, atol=1e-20)
    np.testing.assert_allclose(stats.omega, 0.0, atol=1e-20)


def test_stats_symmetric_and_match_direct_projection(small_basis):
    img = nd.texture((96, 96), seed=22)
    stats = nd.gradient_stats(img, small_basis)
    assert np.abs(stats.rho - stats.rho.T).max() < 1e-10
    assert np.abs(stats.omega - stats.omega.T).max() < 1e-10

    # direct loop oracle for one diagonal entry of the correlation stat
    grad = nd.gradient(img)
    l = m = 5
    v = small_basis.null_vectors[:, 0].reshape(l, m)
    vf = v[::-1, ::-1]
    acc = 0.0
    for pi in range(img.shape[0] - l):
        for pk in range(img.shape[1] - m):
            w = grad[pi:pi + l, pk:pk + m]
            acc += np.sum(w * v) * np.sum(w * vf)
    assert stats.rho[0, 0] == pytest.approx(acc, rel=1e-10)


def test_single_vector_stats_shape():
    img = nd.texture((96, 96), seed=23)
    basis = nd.compute_cns(
        nd.build_operator(nd.estimate_ar(img, 9, 9), 5, 5),
        force_single=True)
    stats = nd.gradient_stats(img, basis)
    assert stats.rho.shape == (1, 1) and stats.omega.shape == (1, 1)


def test_image_too_small_rejected(small_basis):
    with pytest.raises(DimensionError):
        nd.gradient_stats(np.ones((8, 8)), small_basis)


def test_estimate_is_normalized_and_in_span(small_basis):
    img = nd.texture((96, 96), seed=24)
    stats = nd.gradient_stats(img, small_basis)
    h = nd.estimate_psf(stats, small_basis)
    assert abs(h.sum() - 1.0) <= 1e-12
    # expansion lives in the span of the squared-basis grids
    coeffs, *_ = np.linalg.lstsq(small_basis.squared_flat, h.ravel(),
                                 rcond=None)
    recon = small_basis.squared_flat @ coeffs
    assert np.linalg.norm(recon - h.ravel()) <= 1e-10


def test_sign_rule_at_zero_is_positive():
    stats = nd.GradientStats(rho=np.zeros((2, 2)), omega=np.zeros((2, 2)))
    np.testing.assert_array_equal(spectrum_coefficients(stats), [0.0, 0.0])
    stats = nd.GradientStats(rho=np.diag([4.0, -9.0]), omega=np.zeros((2, 2)))
    np.testing.assert_allclose(spectrum_coefficients(stats), [2.0, -3.0])


def test_sharp_image_estimate_is_center_dominant(corpus_texture):
    basis = nd.compute_cns(
        nd.build_operator(nd.estimate_ar(corpus_texture, 13, 13), 7, 7))
    h, _ = nd.optimize_psf(
        nd.estimate_psf(nd.gradient_stats(corpus_texture, basis), basis),
        basis)
    center = (3, 3)
    assert np.unravel_index(np.abs(h).argmax(), h.shape) == center
    assert abs(h[center]) >= 0.5 * np.abs(h).sum()


def test_synthetic_blur_recovery(gaussian_case):
    case = gaussian_case
    target = embed(case.true_kernel, case.size, case.size)
    assert ncc(case.psf, target) >= 0.7


def test_optimize_psf_converges_fast(gaussian_case):
    rep = gaussian_case.psf_report
    assert rep.stop_reason == "eps_reached"
    assert rep.iterations <= 10
    assert rep.lambda_trace[0] == pytest.approx(0.01)
    assert abs(gaussian_case.psf.sum() - 1.0) <= 1e-12


def test_optimize_psf_contraction_and_surface(gaussian_case):
    rep = gaussian_case.psf_report
    res = rep.residual_trace
    ratios = [res[t] / res[t + 1] for t in range(len(res) - 1) if res[t + 1] > 0]
    assert all(r >= 10.0 for r in ratios[:3])


def test_optimize_smooth_kernel_is_fixed_point(small_basis):
    # project a centered smooth bump into the basis span, then optimize
    i, k = np.mgrid[0:5, 0:5] - 2
    bump = np.exp(-(i ** 2 + k ** 2) / 2.0)
    coeffs, *_ = np.linalg.lstsq(small_basis.squared_flat, bump.ravel(),
                                 rcond=None)
    h0 = (small_basis.squared_flat @ coeffs).reshape(5, 5)
    h0 = h0 / h0.sum()
    h1, rep = nd.optimize_psf(h0, small_basis)
    assert np.abs(h1 - h0).max() <= 1e-3
    assert surface_area(h1) <= surface_area(h0) + 1e-9


def test_optimizer_gate_failure_returns_input(small_basis, monkeypatch):
    img = nd.texture((96, 96), seed=25)
    stats = nd.gradient_stats(img, small_basis)
    h0 = nd.estimate_psf(stats, small_basis)
    cfg = OptimizerConfig(theta=1e12, eps=1e-300, max_iters=20)
    h1, rep = nd.optimize_psf(h0, small_basis, cfg)
    assert rep.stop_reason == STOP_GATE
    np.testing.assert_array_equal(h1, h0 / h0.sum())


def test_kernel_basis_mismatch_rejected(small_basis):
    with pytest.raises(DimensionError):
        nd.optimize_psf(nd.delta_kernel(7), small_basis)
