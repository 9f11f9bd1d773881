"""Eigen/null split of the model operator's Gram matrix.

The Gram matrix B = A A^T is small (l*m square); its large-eigenvalue side
carries the image structure the stencil failed to cancel, while the
small-eigenvalue ("null") side spans the kernels compatible with the blur.
The split threshold is half the leading eigenvalue, snapped to the largest
adjacent spectral gap below it.  Null-side dimension shrinks as blur grows,
which makes it a useful blur-severity readout on its own.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .armodel import OperatorMatrix
from .errors import DegenerateOperatorError
from .linalg import sym_eigen

#: Cap on the null-side dimension (bounds downstream K x K solves).
MAX_NULL_DIM = 128

#: Eigen/null threshold as a fraction of the leading eigenvalue.
SPLIT_FRACTION = 0.5

#: Adjacent-eigenvalue ratio that marks a numerical rank boundary.
RANK_CLIFF = 1e6

#: Relative floor applied to eigenvalues before ratios are formed.
_RATIO_FLOOR = 1e-12


@dataclass(frozen=True)
class CnsBasis:
    """Orthonormal eigenbasis of the operator Gram matrix with the
    eigen/null split index.

    ``vectors[:, split:]`` span the null side; ``squared_basis[j]`` is the
    elementwise square of null vector j reshaped to the l x m kernel grid
    (the building blocks every kernel estimate is expanded in).
    """

    l: int
    m: int
    eigenvalues: np.ndarray   # (l*m,), descending
    vectors: np.ndarray       # (l*m, l*m), orthonormal columns
    split: int
    squared_basis: np.ndarray  # (K, l, m), K = l*m - split

    @property
    def null_dim(self) -> int:
        return self.eigenvalues.size - self.split

    @property
    def null_vectors(self) -> np.ndarray:
        """(l*m, K) eigenvector columns spanning the null side."""
        return self.vectors[:, self.split:]

    @property
    def squared_flat(self) -> np.ndarray:
        """(l*m, K) matrix whose columns are the flattened squared grids."""
        return self.squared_basis.reshape(self.null_dim, -1).T


def _pick_split(lam: np.ndarray) -> int:
    """First null index: below half the top eigenvalue, snapped either to
    a decisive numerical-rank cliff anywhere below the threshold or to the
    largest adjacent gap of the steep transition zone that may follow the
    threshold crossing.  Earliest index wins ties."""
    floored = np.maximum(lam, _RATIO_FLOOR * lam[0])
    ratios = floored[:-1] / floored[1:]        # ratios[i-1] = lam[i-1]/lam[i]
    threshold = SPLIT_FRACTION * lam[0]
    below = np.nonzero(lam < threshold)[0]
    below = below[below >= 1]
    if below.size == 0:
        raise DegenerateOperatorError(
            "flat operator spectrum: no eigenvalue falls below half the "
            "leading one, no eigen/null split exists")
    first = int(below[0])
    # a true rank boundary dominates any shape-based refinement
    cliff = ratios[first - 1:]
    if cliff.max() >= RANK_CLIFF:
        return first + int(np.argmax(cliff))
    # otherwise walk down while consecutive eigenvalues keep halving; the
    # null side starts where the decay flattens
    end = first
    while end < lam.size - 1 and ratios[end - 1] >= 1.0 / SPLIT_FRACTION:
        end += 1
    if end == first:
        return first
    zone = ratios[first - 1:end]
    return first + int(np.argmax(zone))


def compute_cns(op: OperatorMatrix, force_single: bool = False,
                max_null: int = MAX_NULL_DIM) -> CnsBasis:
    """Eigendecompose A A^T and locate the eigen/null split.

    ``force_single`` keeps only the single smallest-eigenvalue vector on
    the null side (the high-order denoising mode).
    """
    a = op.matrix
    n = a.shape[0]
    gram = a @ a.T
    eig = sym_eigen(gram)
    lam = eig.values
    if lam[0] <= 1e-12:
        raise DegenerateOperatorError(
            f"operator Gram matrix is numerically zero (lambda_1={lam[0]:.3e})")
    if force_single:
        split = n - 1
    else:
        split = _pick_split(lam)
        if n - split > max_null:
            split = n - max_null
    squared = np.empty((n - split, op.l, op.m))
    for j in range(split, n):
        v = eig.vectors[:, j].reshape(op.l, op.m)
        squared[j - split] = v * v
    return CnsBasis(l=op.l, m=op.m, eigenvalues=lam, vectors=eig.vectors,
                    split=split, squared_basis=squared)


def cns_dimension_for_blur(basis: CnsBasis) -> int:
    """Null-side dimension K; smaller K means stronger blur."""
    return basis.null_dim


def save_basis(path, basis: CnsBasis) -> None:
    """Diagnostic dump: "L M K" header, all eigenvalues, then the null-side
    vectors row-major."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{basis.l} {basis.m} {basis.null_dim}\n")
        fh.write(" ".join(f"{v:.17g}" for v in basis.eigenvalues) + "\n")
        for row in basis.null_vectors:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def load_basis_dump(path) -> dict:
    """Read a :func:`save_basis` file back into plain arrays."""
    with open(path, encoding="ascii") as fh:
        l, m, k = (int(t) for t in fh.readline().split())
        eigenvalues = np.array([float(t) for t in fh.readline().split()])
        rows = [[float(t) for t in fh.readline().split()] for _ in range(l * m)]
    return {"l": l, "m": m, "null_dim": k, "eigenvalues": eigenvalues,
            "null_vectors": np.array(rows)}
