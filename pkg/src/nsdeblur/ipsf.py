"""Inverse-kernel synthesis, two ways.

Spectral route: expand the inverse kernel in the same squared null-basis
grids as the forward kernel and solve for the spectrum that makes the
full convolution with the forward kernel a centered delta.  Space route:
refit the inverse directly against the image, using a re-degraded copy of
the observed image as the regression input.  Both shapes can then be
smoothed by the surface-area penalty, the spectral one in its K-dim
spectrum space and the space one through the full tap-grid system.
"""

from __future__ import annotations

import warnings

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .config import (STOP_GATE, LAMBDA_FLOOR, STOP_CAP, STOP_EPS,
                     OptimizerConfig, RunReport, make_report)
from .errors import DegenerateKernelError, DimensionError
from .grid import as_image, as_kernel, convolve, normalize_kernel
from .nullspace import CnsBasis
from .psf import basis_derivative_products, iterate_spectrum

_CHUNK_ROWS = 64


def convolution_matrix(kernel) -> np.ndarray:
    """(l*m) x ((2l-1)(2m-1)) operator: row (i, j) holds the kernel taps
    placed at offset (i, j), so the product with a flattened
    (2l-1) x (2m-1) grid u computes the full convolution samples
    sum_{k,m} kernel[k,m] * u[i+k, j+m]."""
    k = as_kernel(kernel)
    l, m = k.shape
    wl, wm = 2 * l - 1, 2 * m - 1
    mat = np.zeros((l * m, wl * wm))
    for i in range(l):
        for j in range(m):
            block = np.zeros((wl, wm))
            block[i:i + l, j:j + m] = k
            mat[i * m + j] = block.ravel()
    return mat


def _delta_index(l: int, m: int) -> int:
    """Center of the (2l-1) x (2m-1) full-convolution grid, row-major."""
    return (l - 1) * (2 * m - 1) + (m - 1)


def ipsf_spectral(h, basis: CnsBasis) -> np.ndarray:
    """Inverse kernel in the null-basis expansion.

    Solves (in least squares) for the spectrum u such that the kernel
    sum_j u_j W_j convolved with h equals a delta at the center of the
    full-convolution grid; the result is normalized to unit tap sum.
    """
    hk = as_kernel(h)
    if hk.shape != (basis.l, basis.m):
        raise DimensionError(
            f"kernel {hk.shape} does not match basis {(basis.l, basis.m)}")
    hmat = convolution_matrix(hk)
    m0 = basis.squared_flat.T @ hmat          # (K, N)
    if np.abs(m0).max() <= 1e-300:
        raise DegenerateKernelError("inversion system has zero rank")
    target = np.zeros(m0.shape[1])
    target[_delta_index(basis.l, basis.m)] = 1.0
    u, *_ = np.linalg.lstsq(m0.T, target, rcond=None)
    flat = basis.squared_flat @ u
    s = float(flat.sum())
    if abs(s) <= 1e-12:
        raise DegenerateKernelError(
            "inverse kernel sums to zero; cannot normalize")
    return (flat / s).reshape(basis.l, basis.m)


def optimize_ipsf_spectral(g0, h, basis: CnsBasis,
                           cfg: OptimizerConfig | None = None
                           ) -> tuple[np.ndarray, RunReport]:
    """Surface-penalty smoothing of the spectral inverse kernel: per step
    solve the K x K system with the delta-matching data term, renormalize,
    gate and stop exactly as the forward-kernel optimizer."""
    cfg = cfg or OptimizerConfig()
    g = normalize_kernel(as_kernel(g0))
    if g.shape != (basis.l, basis.m):
        raise DimensionError(
            f"kernel {g.shape} does not match basis {(basis.l, basis.m)}")
    hmat = convolution_matrix(as_kernel(h))
    m0 = basis.squared_flat.T @ hmat
    psi = m0 @ m0.T
    anchor = m0[:, _delta_index(basis.l, basis.m)].copy()
    squared = basis.squared_flat
    u0, *_ = np.linalg.lstsq(squared, g.ravel(), rcond=None)
    dx, dy = basis_derivative_products(basis)
    _, flat, report = iterate_spectrum(u0, squared, psi,
                                       lambda u: anchor, dx, dy, cfg)
    if report.stop_reason == STOP_GATE:
        return g, report
    return flat.reshape(basis.l, basis.m), report


def _space_system(image: np.ndarray, h: np.ndarray
                  ) -> tuple[np.ndarray, np.ndarray, int, int]:
    """Regression system for the space-route inverse: accumulated products
    of re-degraded-image windows against the original's window centers."""
    x = as_image(image)
    hk = as_kernel(h)
    l, m = hk.shape
    wl, wm = 2 * l - 1, 2 * m - 1
    if x.shape[0] < 4 * l or x.shape[1] < 4 * m:
        raise DimensionError(
            f"image {x.shape} too small for a {l}x{m} space-route inverse")
    y = convolve(x, hk)
    wins = sliding_window_view(y, (wl, wm))
    ni, nk = wins.shape[:2]
    n = wl * wm
    ryy = np.zeros((n, n))
    ryx = np.zeros(n)
    centers = x[l - 1:l - 1 + ni, m - 1:m - 1 + nk]
    for i0 in range(0, ni, _CHUNK_ROWS):
        block = wins[i0:i0 + _CHUNK_ROWS].reshape(-1, n)
        ryy += block.T @ block
        ryx += block.T @ centers[i0:i0 + _CHUNK_ROWS].ravel()
    return ryy, ryx, wl, wm


def _effective_ridge(ryy: np.ndarray, ridge: float, quiet: bool = False
                     ) -> float:
    """User ridge, or the default trace-scaled ridge when the system is
    numerically near-singular (relative eigenvalue below 1e-8)."""
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")
    if ridge > 0.0:
        return ridge
    eigvals = np.linalg.eigvalsh(ryy)
    if eigvals[0] <= 1e-8 * max(eigvals[-1], 1e-300):
        ridge = 1e-8 * float(np.trace(ryy)) / ryy.shape[0]
        if not quiet:
            warnings.warn(
                "space-route system is near-singular; applying default "
                f"ridge {ridge:.3e}", RuntimeWarning, stacklevel=3)
    return ridge


def ipsf_space(image, h, ridge: float = 0.0, crop: bool = False,
               ridge_relative: float = 0.0) -> np.ndarray:
    """Space-domain inverse kernel on the (2l-1) x (2m-1) grid.

    Degrades the observed image once more with h, then least-squares fits
    the taps that map re-degraded windows back to the observed centers.
    With ridge 0 a near-singular system is flagged and a default
    trace-scaled ridge applied; ``ridge_relative`` instead scales the
    ridge by trace/rows of the window statistics.  ``crop`` trims the
    result to l x m.
    """
    hk = as_kernel(h)
    ryy, ryx, wl, wm = _space_system(image, hk)
    if ridge_relative > 0.0:
        ridge = ridge_relative * float(np.trace(ryy)) / ryy.shape[0]
    ridge = _effective_ridge(ryy, ridge)
    if ridge > 0.0:
        g = np.linalg.solve(ryy + ridge * np.eye(ryy.shape[0]), ryx)
    else:
        g = np.linalg.pinv(ryy, rcond=1e-10) @ ryx
    g = g.reshape(wl, wm)
    if crop:
        l, m = hk.shape
        ci, ck = wl // 2, wm // 2
        g = g[ci - l // 2:ci + l // 2 + 1, ck - m // 2:ck + m // 2 + 1].copy()
        s = float(g.sum())
        if abs(s) > 1e-12:
            g = g / s    # cropping sheds tap mass; restore unit gain
    return g


def _grad_matrix_1d(n: int) -> np.ndarray:
    """Matrix form of np.gradient along a length-n axis."""
    d = np.zeros((n, n))
    for i in range(1, n - 1):
        d[i, i - 1], d[i, i + 1] = -0.5, 0.5
    d[0, 0], d[0, 1] = -1.0, 1.0
    d[n - 1, n - 2], d[n - 1, n - 1] = -1.0, 1.0
    return d


def difference_operators(wl: int, wm: int) -> dict[str, np.ndarray]:
    """First/second/mixed difference matrices on the flattened wl x wm
    grid, matching the repeated central-difference scheme of the surface
    module (one-sided full differences at the outermost lines)."""
    dx1 = _grad_matrix_1d(wl)
    dy1 = _grad_matrix_1d(wm)
    eye_x = np.eye(wl)
    eye_y = np.eye(wm)
    dx = np.kron(dx1, eye_y)
    dy = np.kron(eye_x, dy1)
    return {"dx": dx, "dy": dy, "dxx": dx @ dx, "dyy": dy @ dy,
            "dxy": dx @ dy}


def curvature_system_matrix(g_flat: np.ndarray, ops: dict[str, np.ndarray]
                            ) -> np.ndarray:
    """Linearized surface-curvature operator at the current taps: the
    matrix whose product with g gives the pointwise curvature field."""
    gx = ops["dx"] @ g_flat
    gy = ops["dy"] @ g_flat
    w = (1.0 + gx * gx + gy * gy) ** -1.5
    lin = ((1.0 + gy * gy)[:, None] * ops["dxx"]
           + (1.0 + gx * gx)[:, None] * ops["dyy"]
           - 2.0 * (gx * gy)[:, None] * ops["dxy"])
    return w[:, None] * lin


def optimize_ipsf_space(g0, image, h, cfg: OptimizerConfig | None = None,
                        ridge: float = 0.0) -> tuple[np.ndarray, RunReport]:
    """Surface-regularized refinement of the space-route inverse: per step
    solve (R_YY - lambda * curvature(g)) g_next = r_YX on the full tap
    grid, with the same stabilizing ridge policy as the primary solve.
    The weight is gated by the same leading-iteration contraction rule as
    the spectral optimizers and halved down to the floor; if no weight
    passes, g0 is returned with a gate-failed report."""
    cfg = cfg or OptimizerConfig()
    g_init = as_image(g0)          # (2l-1) x (2m-1) tap grid, any sign
    ryy, ryx, wl, wm = _space_system(image, as_kernel(h))
    if g_init.shape != (wl, wm):
        raise DimensionError(
            f"initial taps {g_init.shape} do not match system {(wl, wm)}")
    ops = difference_operators(wl, wm)
    ryy = ryy + _effective_ridge(ryy, ridge, quiet=True) * np.eye(wl * wm)
    flat0 = g_init.ravel()
    n_gate = cfg.q + 1

    def run(lam: float):
        flat = flat0.copy()
        diffs: list[float] = []
        stop = STOP_CAP
        for _ in range(cfg.max_iters):
            system = ryy - lam * curvature_system_matrix(flat, ops)
            try:
                flat_new = np.linalg.solve(system, ryx)
            except np.linalg.LinAlgError:
                return None
            if not np.all(np.isfinite(flat_new)):
                return None
            d = float(np.sum((flat_new - flat) ** 2))
            diffs.append(d)
            if 2 <= len(diffs) <= n_gate and d > cfg.eps:
                factor = 1.0 if len(diffs) == 2 else cfg.theta
                if diffs[-1] * factor > diffs[-2]:
                    return None
            flat = flat_new
            if d <= cfg.eps:
                stop = STOP_EPS
                break
        return flat, diffs, stop

    lam = cfg.lambda0
    while lam >= LAMBDA_FLOOR:
        result = run(lam)
        if result is not None:
            flat, diffs, stop = result
            report = make_report(diffs, [lam] * len(diffs), stop)
            return flat.reshape(wl, wm), report
        lam *= 0.5
    return g_init, make_report([], [], STOP_GATE)
