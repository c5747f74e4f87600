"""Symmetric sparse matrices in CSR form.

Thin, immutable wrapper around scipy CSR storage with the row-oriented
queries the spectral pipeline needs: exact row sums, Gershgorin disc
centers/radii, and disc left-ends. Column indices within each row are kept
strictly increasing so that identical inputs always produce bit-identical
arrays.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .errors import InputError


class SparseSymMatrix:
    """Real symmetric matrix in CSR form."""

    __slots__ = ("n", "indptr", "indices", "data", "_csr")

    def __init__(self, n, indptr, indices, data):
        self.n = int(n)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.data = np.ascontiguousarray(data, dtype=np.float64)
        self._csr = sp.csr_matrix(
            (self.data, self.indices, self.indptr), shape=(self.n, self.n), copy=False
        )

    # -- construction -----------------------------------------------------

    @classmethod
    def from_scipy(cls, m) -> "SparseSymMatrix":
        m = sp.csr_matrix(m)
        m.sort_indices()
        return cls(m.shape[0], m.indptr, m.indices, m.data)

    @classmethod
    def from_coo(cls, n: int, rows, cols, vals) -> "SparseSymMatrix":
        """Build from COO triplets; duplicate entries are summed."""
        m = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        m.sort_indices()
        return cls(n, m.indptr, m.indices, m.data)

    @classmethod
    def zeros(cls, n: int) -> "SparseSymMatrix":
        return cls(n, np.zeros(n + 1, dtype=np.int64), [], [])

    # -- queries -----------------------------------------------------------

    @property
    def nnz(self) -> int:
        return int(self.data.size)

    def row(self, i: int):
        sl = slice(self.indptr[i], self.indptr[i + 1])
        return self.indices[sl], self.data[sl]

    def diagonal(self) -> np.ndarray:
        return self._csr.diagonal()

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self._csr @ x

    def matmat(self, X: np.ndarray) -> np.ndarray:
        return self._csr @ X

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray()

    def trace(self) -> float:
        return float(self.diagonal().sum())

    def frobenius_norm(self) -> float:
        return float(np.sqrt(np.sum(self.data * self.data)))

    def row_sums(self) -> np.ndarray:
        """Per-row sums, accumulated in stored (ascending-column) order."""
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        return np.bincount(rows, weights=self.data, minlength=self.n)

    def gershgorin(self) -> tuple[np.ndarray, np.ndarray]:
        """Disc centers (diagonal) and radii (off-diagonal absolute row sums).

        Radii are accumulated in the same sequential order as :meth:`row_sums`
        so that e.g. a combinatorial Laplacian gets bit-exact ``c_i == r_i``.
        """
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        absdata = np.abs(self.data)
        absdata[rows == self.indices] = 0.0
        radii = np.bincount(rows, weights=absdata, minlength=self.n)
        return self.diagonal(), radii

    def disc_left_ends(self) -> np.ndarray:
        c, r = self.gershgorin()
        return c - r

    def check_symmetric(self, rtol: float = 1e-12) -> None:
        """Raise if the matrix is not numerically symmetric."""
        d = self._csr - self._csr.T
        scale = float(np.max(np.abs(self.data))) if self.nnz else 0.0
        if d.nnz and np.max(np.abs(d.data)) > rtol * max(scale, 1.0):
            raise InputError("matrix is not symmetric")

    def __repr__(self) -> str:
        return f"SparseSymMatrix(n={self.n}, nnz={self.nnz})"
