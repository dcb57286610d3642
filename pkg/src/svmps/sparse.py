"""Sparse kernels: sparse vectors over a CI basis and CSR matrices.

The parallel contract mirrors a row-distributed Hamiltonian with a fully
replicated input vector: rows are block-partitioned over workers, each block
is reduced in fixed ascending order and the per-block results are
concatenated in row order.  The output is therefore bit-for-bit identical
for every worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

MIN_NORMALIZE = 1e-300


@dataclass(frozen=True)
class SparseVector:
    """Index-ascending sparse vector with real amplitudes."""

    dim: int
    indices: np.ndarray  # int64, strictly ascending
    values: np.ndarray   # float64

    @classmethod
    def empty(cls, dim: int) -> "SparseVector":
        return cls(dim, np.empty(0, dtype=np.int64), np.empty(0))

    @classmethod
    def from_entries(cls, dim: int, indices, values, prune: float = 0.0) -> "SparseVector":
        """Sort by index, merge duplicates (in input order), drop zeros."""
        indices = np.asarray(indices, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        if indices.size:
            order = np.argsort(indices, kind="stable")
            indices, values = indices[order], values[order]
            new = np.empty(indices.size, dtype=bool)
            new[0] = True
            new[1:] = indices[1:] != indices[:-1]
            starts = np.flatnonzero(new)
            indices = indices[starts]
            values = np.add.reduceat(values, starts)
        keep = values != 0.0 if prune <= 0.0 else np.abs(values) >= prune
        return cls(dim, indices[keep], np.ascontiguousarray(values[keep]))

    @classmethod
    def basis_state(cls, dim: int, position: int) -> "SparseVector":
        return cls(dim, np.array([position], dtype=np.int64), np.array([1.0]))

    @classmethod
    def from_dense(cls, dense: np.ndarray, prune: float = 0.0) -> "SparseVector":
        dense = np.asarray(dense, dtype=np.float64)
        keep = dense != 0.0 if prune <= 0.0 else np.abs(dense) >= prune
        idx = np.flatnonzero(keep)
        return cls(dense.size, idx.astype(np.int64), dense[idx].copy())

    @property
    def nnz(self) -> int:
        return self.indices.size

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out

    def __repr__(self) -> str:
        return f"SparseVector(dim={self.dim}, nnz={self.nnz})"


class CsrMatrix:
    """Compressed sparse row matrix with real entries."""

    __slots__ = ("n_rows", "n_cols", "row_offsets", "col_indices", "values")

    def __init__(self, n_rows, n_cols, row_offsets, col_indices, values):
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self.row_offsets = np.asarray(row_offsets, dtype=np.int64)
        self.col_indices = np.asarray(col_indices, dtype=np.int64)
        self.values = np.asarray(values, dtype=np.float64)

    @classmethod
    def from_coo(cls, n_rows, n_cols, rows, cols, values) -> "CsrMatrix":
        """Build from triplets; duplicates merge, exact zeros drop."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        if rows.size:
            order = np.lexsort((cols, rows))
            rows, cols, values = rows[order], cols[order], values[order]
            new = np.empty(rows.size, dtype=bool)
            new[0] = True
            new[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
            starts = np.flatnonzero(new)
            rows, cols = rows[starts], cols[starts]
            values = np.add.reduceat(values, starts)
            keep = values != 0.0
            rows, cols, values = rows[keep], cols[keep], values[keep]
        offsets = np.zeros(n_rows + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n_rows), out=offsets[1:])
        return cls(n_rows, n_cols, offsets, cols, np.ascontiguousarray(values))

    @classmethod
    def identity(cls, n: int) -> "CsrMatrix":
        idx = np.arange(n, dtype=np.int64)
        return cls(n, n, np.arange(n + 1, dtype=np.int64), idx, np.ones(n))

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "CsrMatrix":
        rows, cols = np.nonzero(dense)
        return cls.from_coo(dense.shape[0], dense.shape[1], rows, cols, dense[rows, cols])

    @property
    def nnz(self) -> int:
        return self.values.size

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols))
        row_lengths = np.diff(self.row_offsets)
        rows = np.repeat(np.arange(self.n_rows), row_lengths)
        out[rows, self.col_indices] = self.values
        return out

    def transpose(self) -> "CsrMatrix":
        row_lengths = np.diff(self.row_offsets)
        rows = np.repeat(np.arange(self.n_rows, dtype=np.int64), row_lengths)
        return CsrMatrix.from_coo(self.n_cols, self.n_rows, self.col_indices, rows, self.values)

    def symmetry_defect(self) -> float:
        """Max |M - M^T| entry; 0 for an exactly symmetric matrix."""
        t = self.transpose()
        if (np.array_equal(t.row_offsets, self.row_offsets)
                and np.array_equal(t.col_indices, self.col_indices)):
            return float(np.max(np.abs(t.values - self.values), initial=0.0))
        # Sparsity patterns differ: fall back to a triplet comparison.
        diff = {}
        for mat, sign in ((self, 1.0), (t, -1.0)):
            lengths = np.diff(mat.row_offsets)
            rows = np.repeat(np.arange(mat.n_rows), lengths)
            for r, c, v in zip(rows, mat.col_indices, mat.values):
                key = (int(r), int(c))
                diff[key] = diff.get(key, 0.0) + sign * v
        return max((abs(v) for v in diff.values()), default=0.0)

    def validate(self, hermitian_tol: float | None = None):
        ro = self.row_offsets
        if ro[0] != 0 or ro[-1] != self.nnz or np.any(np.diff(ro) < 0):
            raise ValueError("row offsets are not a valid non-decreasing prefix")
        for r in range(self.n_rows):
            cols = self.col_indices[ro[r]:ro[r + 1]]
            if cols.size and (np.any(np.diff(cols) <= 0) or cols[0] < 0 or cols[-1] >= self.n_cols):
                raise ValueError(f"row {r} columns not strictly ascending in range")
        if hermitian_tol is not None and self.symmetry_defect() > hermitian_tol:
            raise ValueError("matrix flagged Hamiltonian is not symmetric")

    def __repr__(self) -> str:
        return f"CsrMatrix({self.n_rows}x{self.n_cols}, nnz={self.nnz})"


def _row_block(m: CsrMatrix, x_dense: np.ndarray, lo: int, hi: int, prune: float):
    ro = m.row_offsets
    a, b = ro[lo], ro[hi]
    prods = m.values[a:b] * x_dense[m.col_indices[a:b]]
    y = np.zeros(hi - lo)
    seg = ro[lo:hi + 1] - a
    nonempty = seg[1:] > seg[:-1]
    if prods.size:
        y[nonempty] = np.add.reduceat(prods, seg[:-1][nonempty])
    keep = y != 0.0 if prune <= 0.0 else np.abs(y) >= prune
    local = np.flatnonzero(keep)
    return local + lo, y[local]


def spmspv(m: CsrMatrix, v: SparseVector, prune: float = 0.0,
           n_workers: int = 1) -> SparseVector:
    """Sparse matrix times sparse vector, exact by default.

    The input vector is scattered once (replicated view); each worker owns a
    contiguous row block.  Results are concatenated in row order, so the
    output does not depend on ``n_workers``.
    """
    if m.n_cols != v.dim:
        raise ValueError(f"dimension mismatch: matrix {m.n_cols} columns, vector {v.dim}")
    if v.nnz == 0:
        return SparseVector.empty(m.n_rows)
    x_dense = v.to_dense()
    blocks = _block_ranges(m.n_rows, n_workers)
    if len(blocks) == 1:
        idx, val = _row_block(m, x_dense, 0, m.n_rows, prune)
        return SparseVector(m.n_rows, idx, val)
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(lambda b: _row_block(m, x_dense, b[0], b[1], prune), blocks))
    else:
        parts = [_row_block(m, x_dense, lo, hi, prune) for lo, hi in blocks]
    idx = np.concatenate([p[0] for p in parts])
    val = np.concatenate([p[1] for p in parts])
    return SparseVector(m.n_rows, idx, val)


def _block_ranges(n_rows: int, n_workers: int):
    n_blocks = max(1, min(n_workers, n_rows))
    edges = np.linspace(0, n_rows, n_blocks + 1).astype(int)
    return [(int(edges[i]), int(edges[i + 1])) for i in range(n_blocks)]


def dot(u: SparseVector, v: SparseVector) -> float:
    """Inner product by merge-join over the two sorted index lists."""
    if u.dim != v.dim:
        raise ValueError("dimension mismatch in dot")
    if u.nnz == 0 or v.nnz == 0:
        return 0.0
    pos = np.searchsorted(u.indices, v.indices)
    pos_clipped = np.minimum(pos, u.nnz - 1)
    match = u.indices[pos_clipped] == v.indices
    return float(np.dot(u.values[pos_clipped[match]], v.values[match]))


def axpy(a: float, x: SparseVector, y: SparseVector, prune: float = 0.0) -> SparseVector:
    """a*x + y as a sorted merged vector; exact cancellations drop out."""
    if x.dim != y.dim:
        raise ValueError("dimension mismatch in axpy")
    idx = np.concatenate([x.indices, y.indices])
    val = np.concatenate([a * x.values, y.values])
    return SparseVector.from_entries(x.dim, idx, val, prune)


def scale(a: float, x: SparseVector) -> SparseVector:
    if a == 0.0:
        return SparseVector.empty(x.dim)
    return SparseVector(x.dim, x.indices, a * x.values)


def norm(x: SparseVector) -> float:
    return float(np.linalg.norm(x.values))


def normalize(x: SparseVector) -> SparseVector:
    n = norm(x)
    if n <= MIN_NORMALIZE:
        raise ValueError("cannot normalize a (near-)zero vector")
    return SparseVector(x.dim, x.indices, x.values / n)
