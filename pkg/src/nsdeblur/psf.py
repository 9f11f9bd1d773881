"""Blur-kernel estimation from gradient statistics projected onto the
null-side basis, plus surface-regularized shape optimization of the
spectrum coefficients.

The kernel estimate is h = sum_j v_j * W_j where W_j are the squared
null-basis grids; the coefficients come from the diagonal of two K x K
projections of the image-gradient statistics (a cross-flipped correlation
matrix and an averaged-shift matrix).  Optimization re-solves a small
K x K system per iteration, trading data fidelity against the surface
area of the kernel.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from dataclasses import dataclass

from .config import (LAMBDA_FLOOR, STOP_CAP, STOP_EPS, STOP_GATE,
                     OptimizerConfig, RunReport, make_report)
from .errors import DegenerateKernelError, DimensionError
from .grid import as_kernel, gradient, normalize_kernel
from .nullspace import CnsBasis

_CHUNK_ROWS = 64


@dataclass(frozen=True)
class GradientStats:
    """K x K spectral projections of the degraded image's gradient field:
    ``rho`` from the cross-flipped window correlation, ``omega`` from the
    averaged mutual shifts.  Only their diagonals feed the estimate."""

    rho: np.ndarray
    omega: np.ndarray


def _window_gram(field: np.ndarray, l: int, m: int) -> np.ndarray:
    """Sum of w w^T over all l x m windows of ``field`` (positions limited
    to (rows-l) x (cols-m) as in the extended-matrix layout)."""
    wins = sliding_window_view(field, (l, m))[:field.shape[0] - l,
                                              :field.shape[1] - m]
    ni, nk = wins.shape[:2]
    gram = np.zeros((l * m, l * m))
    for i0 in range(0, ni, _CHUNK_ROWS):
        block = wins[i0:i0 + _CHUNK_ROWS].reshape(-1, l * m)
        gram += block.T @ block
    return gram


def _shift_average_matrix(field: np.ndarray, l: int, m: int) -> np.ndarray:
    """Matrix of mean field values over all mutual shifts: entry
    ((i,lc),(j,mc)) is the mean of field[i+j+k+1, lc+mc+n+1] over the
    (rows-2l) x (cols-2m) position grid."""
    rows, cols = field.shape
    kx, ky = rows - 2 * l, cols - 2 * m
    # box means via an integral image (exact, O(1) per offset)
    csum = np.zeros((rows + 1, cols + 1))
    csum[1:, 1:] = field.cumsum(0).cumsum(1)

    def box_mean(u, v):
        s = (csum[u + kx, v + ky] - csum[u, v + ky]
             - csum[u + kx, v] + csum[u, v])
        return s / (kx * ky)

    t2 = np.empty((2 * l - 1, 2 * m - 1))
    for a in range(2 * l - 1):
        for b in range(2 * m - 1):
            t2[a, b] = box_mean(a + 1, b + 1)
    ii = np.repeat(np.arange(l), m)
    ll = np.tile(np.arange(m), l)
    return t2[ii[:, None] + ii[None, :], ll[:, None] + ll[None, :]]


def gradient_stats(image, basis: CnsBasis) -> GradientStats:
    """Project the gradient-field statistics onto the null-side basis."""
    l, m = basis.l, basis.m
    img = np.asarray(image, dtype=np.float64)
    if img.shape[0] < 2 * l + 1 or img.shape[1] < 2 * m + 1:
        raise DimensionError(
            f"image {img.shape} too small for {l}x{m} gradient statistics")
    grad = gradient(img)
    gram = _window_gram(grad, l, m)
    cross = gram[:, ::-1]                      # columns reversed: Gram . J
    v_ns = basis.null_vectors
    rho = v_ns.T @ cross @ v_ns
    rho = 0.5 * (rho + rho.T)                  # quadratic form: diag unchanged
    omega = v_ns.T @ _shift_average_matrix(grad, l, m) @ v_ns
    return GradientStats(rho=rho, omega=omega)


def spectrum_coefficients(stats: GradientStats) -> np.ndarray:
    """Signed square-root combination of the two diagonal statistics."""
    d = np.diag(stats.rho) + np.diag(stats.omega) ** 2
    sign = np.where(d < 0, -1.0, 1.0)          # sign(0) treated as +1
    return sign * np.sqrt(np.abs(d))


def estimate_psf(stats: GradientStats, basis: CnsBasis) -> np.ndarray:
    """Assemble the normalized kernel from the spectrum coefficients."""
    if stats.rho.shape[0] != basis.null_dim:
        raise DimensionError(
            f"stats dimension {stats.rho.shape[0]} != basis K {basis.null_dim}")
    v = spectrum_coefficients(stats)
    flat = basis.squared_flat @ v
    s = float(flat.sum())
    if abs(s) <= 1e-12:
        raise DegenerateKernelError(
            "assembled kernel sums to zero; cannot normalize")
    return (flat / s).reshape(basis.l, basis.m)


def _replicate_central_diff(grid: np.ndarray, axis: int) -> np.ndarray:
    p = np.pad(grid, 1, mode="edge")
    if axis == 0:
        return 0.5 * (p[2:, 1:-1] - p[:-2, 1:-1])
    return 0.5 * (p[1:-1, 2:] - p[1:-1, :-2])


def basis_derivative_products(basis: CnsBasis) -> tuple[np.ndarray, np.ndarray]:
    """(l*m, K) matrices of Vx*V and Vy*V for each null vector: the
    half-derivatives of the squared grids (replicate central differences)."""
    n, k = basis.l * basis.m, basis.null_dim
    dx = np.empty((n, k))
    dy = np.empty((n, k))
    for j in range(k):
        v = basis.null_vectors[:, j].reshape(basis.l, basis.m)
        dx[:, j] = (_replicate_central_diff(v, 0) * v).ravel()
        dy[:, j] = (_replicate_central_diff(v, 1) * v).ravel()
    return dx, dy


def surface_penalty_matrix(v: np.ndarray, dx: np.ndarray, dy: np.ndarray
                           ) -> np.ndarray:
    """K x K matrix of the linearized surface-area term at spectrum v:
    sum over taps of the derivative products weighted by the inverse local
    surface element sqrt(1 + hx^2 + hy^2)."""
    gx = dx @ v
    gy = dy @ v
    den = np.sqrt(1.0 + 4.0 * gx * gx + 4.0 * gy * gy)
    w = 1.0 / den
    return (dx * w[:, None]).T @ dx + (dy * w[:, None]).T @ dy


def iterate_spectrum(v0: np.ndarray, squared: np.ndarray,
                     system_gram: np.ndarray, rhs_fn, dx: np.ndarray,
                     dy: np.ndarray, cfg: OptimizerConfig
                     ) -> tuple[np.ndarray, np.ndarray, RunReport]:
    """Shared gate-and-iterate driver for the spectral kernel optimizers.

    Solves (system_gram + 2*lambda*penalty(v)) v_next = rhs_fn(v) per step,
    renormalizing the kernel each time.  The weight lambda starts at
    cfg.lambda0 and is halved (restarting from v0) until the first cfg.q
    steps contract by at least cfg.theta; if no weight down to the floor
    passes the gate, v0 is returned with a gate-failed report.
    Returns (v, kernel_flat, report).
    """
    flat0 = squared @ v0
    n_gate = cfg.q + 1

    def run(lam: float):
        v = v0.copy()
        flat = flat0.copy()
        diffs: list[float] = []
        stop = STOP_CAP
        for _ in range(cfg.max_iters):
            system = system_gram + 2.0 * lam * surface_penalty_matrix(v, dx, dy)
            try:
                v_new = np.linalg.solve(system, rhs_fn(v))
            except np.linalg.LinAlgError:
                return None
            flat_new = squared @ v_new
            s = float(flat_new.sum())
            if abs(s) <= 1e-12 or not np.all(np.isfinite(flat_new)):
                return None
            flat_new /= s
            v_new = v_new / s
            d = float(np.sum((flat_new - flat) ** 2))
            diffs.append(d)
            if 2 <= len(diffs) <= n_gate and d > cfg.eps:
                # the first pair measures the initialization jump, so it
                # only needs to not grow; later pairs must contract by theta
                factor = 1.0 if len(diffs) == 2 else cfg.theta
                if diffs[-1] * factor > diffs[-2]:
                    return None
            v, flat = v_new, flat_new
            if d <= cfg.eps:
                stop = STOP_EPS
                break
        return v, flat, diffs, stop

    lam = cfg.lambda0
    while lam >= LAMBDA_FLOOR:
        result = run(lam)
        if result is not None:
            v, flat, diffs, stop = result
            report = make_report(diffs, [lam] * len(diffs), stop)
            return v, flat, report
        lam *= 0.5
    report = make_report([], [], STOP_GATE)
    return v0, flat0, report


def optimize_psf(h0, basis: CnsBasis, cfg: OptimizerConfig | None = None
                 ) -> tuple[np.ndarray, RunReport]:
    """Smooth the kernel estimate in its spectrum space.

    Each step solves the K x K system with data term Gram(W)^2 and the
    surface penalty, then reassembles and renormalizes the kernel.  Stops
    when the summed squared tap change drops below cfg.eps.
    """
    cfg = cfg or OptimizerConfig()
    h = normalize_kernel(as_kernel(h0))
    if h.shape != (basis.l, basis.m):
        raise DimensionError(
            f"kernel {h.shape} does not match basis {(basis.l, basis.m)}")
    squared = basis.squared_flat
    v0, *_ = np.linalg.lstsq(squared, h.ravel(), rcond=None)
    gram = squared.T @ squared
    dx, dy = basis_derivative_products(basis)
    anchor = squared.T @ h.ravel()   # projections of the estimate being smoothed

    _, flat, report = iterate_spectrum(v0, squared, gram,
                                       lambda v: anchor, dx, dy, cfg)
    if report.stop_reason == STOP_GATE:
        return h, report
    return flat.reshape(basis.l, basis.m), report
