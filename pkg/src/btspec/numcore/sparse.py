"""Row-compressed complex matrices."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sps


class SparseMatrix:
    """Square CSR matrix with complex128 values.

    Column indices are strictly increasing within each row. The matrix is
    immutable once built; :meth:`with_data` returns a new matrix sharing
    the sparsity pattern.
    """

    __slots__ = ("n", "indptr", "indices", "data", "_csr")

    def __init__(self, n, indptr, indices, data, check=True):
        self.n = int(n)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.data = np.asarray(data, dtype=np.complex128)
        if check:
            self._validate()
        for a in (self.indptr, self.indices, self.data):
            a.setflags(write=False)
        self._csr = sps.csr_matrix((self.data, self.indices, self.indptr),
                                   shape=(self.n, self.n))

    def _validate(self):
        n = self.n
        if self.indptr.shape != (n + 1,) or self.indptr[0] != 0:
            raise ValueError("bad row offsets")
        if np.any(np.diff(self.indptr) < 0):
            raise ValueError("row offsets must be non-decreasing")
        nnz = int(self.indptr[-1])
        if self.indices.shape != (nnz,) or self.data.shape != (nnz,):
            raise ValueError("index/value arrays do not match row offsets")
        if nnz and (self.indices.min() < 0 or self.indices.max() >= n):
            raise ValueError("column index out of range")
        d = np.diff(self.indices)
        row_start = np.zeros(nnz, dtype=bool)
        row_start[self.indptr[:-1][self.indptr[:-1] < nnz]] = True
        if np.any((d <= 0) & ~row_start[1:]):
            raise ValueError("column indices must increase strictly within a row")

    @classmethod
    def from_triplets(cls, n, rows, cols, vals):
        """Assemble from (row, col, value) triplets, summing duplicates."""
        pattern = TripletPattern(n, rows, cols)
        return pattern.matrix(vals)

    @classmethod
    def from_dense(cls, a):
        a = np.asarray(a, dtype=np.complex128)
        rows, cols = np.nonzero(a)
        return cls.from_triplets(a.shape[0], rows, cols, a[rows, cols])

    @classmethod
    def identity(cls, n):
        i = np.arange(n)
        return cls(n, np.arange(n + 1), i, np.ones(n))

    @classmethod
    def diag(cls, values):
        values = np.asarray(values, dtype=np.complex128)
        n = values.size
        return cls(n, np.arange(n + 1), np.arange(n), values)

    @property
    def nnz(self) -> int:
        return int(self.indptr[-1])

    @property
    def shape(self):
        return (self.n, self.n)

    def with_data(self, data) -> "SparseMatrix":
        return SparseMatrix(self.n, self.indptr, self.indices, data, check=False)

    def diagonal(self) -> np.ndarray:
        return self._csr.diagonal()

    def conj_transpose(self) -> "SparseMatrix":
        c = self._csr.conj().T.tocsr()
        c.sort_indices()
        return SparseMatrix(self.n, c.indptr, c.indices, c.data, check=False)

    def todense(self) -> np.ndarray:
        return self._csr.toarray()

    def to_scipy(self) -> sps.csr_matrix:
        return self._csr

    def __matmul__(self, x):
        return spmv(self, x)

    def __repr__(self):
        return f"SparseMatrix(n={self.n}, nnz={self.nnz})"


class TripletPattern:
    """Sparsity pattern of a triplet list, reusable for many value sets.

    Maps each input triplet to its slot in the CSR data array so that
    matrices with the same pattern but different values are cheap.
    """

    def __init__(self, n, rows, cols):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        if rows.shape != cols.shape:
            raise ValueError("rows and cols differ in length")
        if rows.size and (min(rows.min(), cols.min()) < 0 or max(rows.max(), cols.max()) >= n):
            raise ValueError("triplet index out of range")
        self.n = int(n)
        keys = rows * n + cols
        uniq, self.slot = np.unique(keys, return_inverse=True)
        self.nnz = uniq.size
        self.indices = uniq % n
        urows = uniq // n
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(urows, minlength=n), out=self.indptr[1:])

    def gather(self, vals) -> np.ndarray:
        vals = np.broadcast_to(np.asarray(vals, dtype=np.complex128), self.slot.shape)
        out = np.zeros(self.nnz, dtype=np.complex128)
        np.add.at(out, self.slot, vals)
        return out

    def matrix(self, vals) -> SparseMatrix:
        return SparseMatrix(self.n, self.indptr, self.indices, self.gather(vals), check=False)


def spmv(A: SparseMatrix, x) -> np.ndarray:
    """Return ``A @ x`` for a complex vector ``x`` of length ``A.n``."""
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != A.n:
        raise ValueError(f"dimension mismatch: matrix is {A.n}x{A.n}, vector has shape {x.shape}")
    return A._csr @ x.astype(np.complex128, copy=False)
