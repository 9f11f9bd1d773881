"""Dense least squares, symmetric eigendecomposition and pseudo-inverse.

Thin contracts over numpy.linalg: eigenvalues are always returned in
descending order, least squares supports an optional ridge term, and the
pseudo-inverse uses a relative singular-value cutoff.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

#: Default relative singular-value cutoff for pseudo-inversion.
PINV_CUTOFF = 1e-10


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectrum of a symmetric matrix, sorted by decreasing eigenvalue.

    ``vectors[:, j]`` is the unit eigenvector for ``values[j]``.
    """

    values: np.ndarray
    vectors: np.ndarray


def solve_least_squares(matrix, rhs, ridge: float = 0.0) -> np.ndarray:
    """argmin_x ||M x - b||^2 + ridge * ||x||^2.

    With ridge 0 and a rank-deficient matrix the minimum-norm solution is
    returned and a degeneracy warning is emitted.
    """
    m = np.asarray(matrix, dtype=np.float64)
    b = np.asarray(rhs, dtype=np.float64).ravel()
    if m.ndim != 2 or m.shape[0] != b.shape[0]:
        raise ValueError(f"shape mismatch: matrix {m.shape} vs rhs {b.shape}")
    if ridge < 0.0:
        raise ValueError("ridge must be nonnegative")
    if ridge == 0.0:
        x, _, rank, _ = np.linalg.lstsq(m, b, rcond=None)
        if rank < m.shape[1]:
            warnings.warn(
                f"least-squares system rank {rank} < {m.shape[1]} unknowns; "
                "returning minimum-norm solution", RuntimeWarning, stacklevel=2)
        return x
    gram = m.T @ m + ridge * np.eye(m.shape[1])
    return np.linalg.solve(gram, m.T @ b)


def sym_eigen(matrix, rtol: float = 1e-10) -> EigenDecomposition:
    """Full spectrum of a symmetric matrix, descending order."""
    b = np.asarray(matrix, dtype=np.float64)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError(f"matrix must be square, got {b.shape}")
    scale = np.abs(b).max()
    if scale > 0 and np.abs(b - b.T).max() > rtol * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    values, vectors = np.linalg.eigh(0.5 * (b + b.T))
    order = np.argsort(values)[::-1]
    return EigenDecomposition(values=values[order], vectors=vectors[:, order])


def pseudo_inverse(matrix, tol: float = PINV_CUTOFF) -> np.ndarray:
    """Moore-Penrose inverse; singular values below tol * sigma_max dropped."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"matrix must be a non-empty 2D array, got {m.shape}")
    return np.linalg.pinv(m, rcond=tol)
