"""Compressed-sparse-row matrices and the structural operations on them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from asnewton.linalg._backend import kernels

INDEX = np.intp


def _readonly(a, dtype):
    if isinstance(a, np.ndarray) and a.dtype == dtype and a.flags.c_contiguous and not a.flags.writeable:
        return a
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """CSR matrix with sorted, duplicate-free column indices in every row."""

    n_rows: int
    n_cols: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        indptr = _readonly(self.row_offsets, INDEX)
        indices = _readonly(self.col_indices, INDEX)
        data = _readonly(self.values, float)
        object.__setattr__(self, "row_offsets", indptr)
        object.__setattr__(self, "col_indices", indices)
        object.__setattr__(self, "values", data)
        if indptr.shape != (self.n_rows + 1,) or indptr[0] != 0:
            raise ValueError("row_offsets must have length n_rows + 1 and start at 0")
        nnz = indptr[-1]
        if indices.shape != (nnz,) or data.shape != (nnz,):
            raise ValueError("col_indices/values length must equal row_offsets[-1]")
        if np.any(np.diff(indptr) < 0):
            raise ValueError("row_offsets must be nondecreasing")
        if nnz:
            if indices.min() < 0 or indices.max() >= self.n_cols:
                raise ValueError("column index out of range")
            rows = self.row_ids()
            same_row = rows[1:] == rows[:-1]
            if np.any(np.diff(indices)[same_row] <= 0):
                raise ValueError("column indices must be strictly increasing within each row")
            if not np.isfinite(data).all():
                raise ValueError("stored values must be finite")

    # construction -----------------------------------------------------

    @classmethod
    def from_coo(cls, rows, cols, vals, shape) -> "SparseMatrix":
        """Assemble from triplets; duplicates are summed, explicit zeros kept."""
        n_rows, n_cols = shape
        rows = np.asarray(rows, dtype=INDEX).reshape(-1)
        cols = np.asarray(cols, dtype=INDEX).reshape(-1)
        vals = np.asarray(vals, dtype=float).reshape(-1)
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        if rows.size:
            new = np.empty(rows.size, dtype=bool)
            new[0] = True
            new[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
            group = np.cumsum(new) - 1
            vals = np.bincount(group, weights=vals, minlength=group[-1] + 1)
            rows, cols = rows[new], cols[new]
        indptr = np.zeros(n_rows + 1, dtype=INDEX)
        np.cumsum(np.bincount(rows, minlength=n_rows), out=indptr[1:])
        return cls(n_rows, n_cols, indptr, cols, vals)

    @classmethod
    def from_dense(cls, a) -> "SparseMatrix":
        a = np.atleast_2d(np.asarray(a, dtype=float))
        r, c = np.nonzero(a)
        return cls.from_coo(r, c, a[r, c], a.shape)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls.diag(np.ones(n))

    @classmethod
    def diag(cls, d) -> "SparseMatrix":
        d = np.asarray(d, dtype=float)
        n = d.size
        return cls(n, n, np.arange(n + 1), np.arange(n), d)

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "SparseMatrix":
        return cls(n_rows, n_cols, np.zeros(n_rows + 1), np.zeros(0), np.zeros(0))

    def with_values(self, values) -> "SparseMatrix":
        """Same pattern, new values (no structural re-validation beyond lengths)."""
        values = np.asarray(values, dtype=float)
        if values.shape != self.values.shape:
            raise ValueError("values length does not match the pattern")
        return SparseMatrix(self.n_rows, self.n_cols, self.row_offsets, self.col_indices, values)

    # queries ------------------------------------------------------------

    @property
    def shape(self) -> tuple:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return int(self.row_offsets[-1])

    def row_ids(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_rows, dtype=INDEX), np.diff(self.row_offsets))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape)
        out[self.row_ids(), self.col_indices] = self.values
        return out

    def diagonal(self) -> np.ndarray:
        rows = self.row_ids()
        on = rows == self.col_indices
        d = np.zeros(min(self.shape))
        d[rows[on]] = self.values[on]
        return d

    def diagonal_positions(self) -> np.ndarray:
        """Index into ``values`` of each diagonal entry, -1 where it is not stored."""
        rows = self.row_ids()
        on = np.flatnonzero(rows == self.col_indices)
        pos = np.full(min(self.shape), -1, dtype=INDEX)
        pos[rows[on]] = on
        return pos

    def norm_1(self) -> float:
        """Maximum absolute column sum."""
        if self.nnz == 0:
            return 0.0
        return float(np.bincount(self.col_indices, weights=np.abs(self.values), minlength=self.n_cols).max())

    def norm_inf(self) -> float:
        """Maximum absolute row sum."""
        if self.nnz == 0:
            return 0.0
        return float(np.bincount(self.row_ids(), weights=np.abs(self.values), minlength=self.n_rows).max())

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix.from_coo(self.col_indices, self.row_ids(), self.values, (self.n_cols, self.n_rows))

    def is_symmetric(self) -> bool:
        """Exact (bitwise) symmetry of pattern and values."""
        if self.n_rows != self.n_cols:
            return False
        t = self.transpose()
        return (
            np.array_equal(t.row_offsets, self.row_offsets)
            and np.array_equal(t.col_indices, self.col_indices)
            and np.array_equal(t.values, self.values)
        )

    def row_scale(self, d) -> "SparseMatrix":
        d = np.asarray(d, dtype=float)
        return self.with_values(self.values * d[self.row_ids()])

    def __matmul__(self, x):
        return spmv(self, x)


def spmv(A: SparseMatrix, x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=float)
    if x.shape != (A.n_cols,):
        raise ValueError(f"dimension mismatch: matrix has {A.n_cols} columns, vector length {x.shape}")
    return kernels.spmv(A.row_offsets, A.col_indices, A.values, x)


def spmv_transpose(A: SparseMatrix, x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=float)
    if x.shape != (A.n_rows,):
        raise ValueError(f"dimension mismatch: matrix has {A.n_rows} rows, vector length {x.shape}")
    return kernels.spmv_transpose(A.row_offsets, A.col_indices, A.values, x, A.n_cols)


def _check_index_list(idx, bound, what):
    idx = np.asarray(idx, dtype=INDEX).reshape(-1)
    if idx.size:
        if idx[0] < 0 or idx[-1] >= bound:
            raise IndexError(f"{what} index out of range")
        if np.any(np.diff(idx) <= 0):
            raise ValueError(f"{what} indices must be strictly increasing")
    return idx


def extract_submatrix(A: SparseMatrix, rows, cols) -> SparseMatrix:
    """Return ``A[rows][:, cols]`` for strictly increasing index lists."""
    rows = _check_index_list(rows, A.n_rows, "row")
    cols = _check_index_list(cols, A.n_cols, "column")
    colmap = np.full(A.n_cols, -1, dtype=INDEX)
    colmap[cols] = np.arange(cols.size, dtype=INDEX)

    starts = A.row_offsets[rows]
    counts = A.row_offsets[rows + 1] - starts
    total = int(counts.sum())
    # positions of every stored entry in the selected rows
    offsets = np.repeat(starts - np.cumsum(counts) + counts, counts)
    pos = np.arange(total, dtype=INDEX) + offsets
    new_cols = colmap[A.col_indices[pos]]
    keep = new_cols >= 0
    owner = np.repeat(np.arange(rows.size, dtype=INDEX), counts)[keep]
    indptr = np.zeros(rows.size + 1, dtype=INDEX)
    np.cumsum(np.bincount(owner, minlength=rows.size), out=indptr[1:])
    return SparseMatrix(rows.size, cols.size, indptr, new_cols[keep], A.values[pos[keep]])


def add_diagonal(A: SparseMatrix, d) -> SparseMatrix:
    """Return ``A + diag(d)``; missing diagonal positions are inserted."""
    if A.n_rows != A.n_cols:
        raise ValueError("add_diagonal needs a square matrix")
    d = np.asarray(d, dtype=float)
    if d.shape != (A.n_rows,):
        raise ValueError("diagonal length mismatch")
    pos = A.diagonal_positions()
    if np.all(pos >= 0):
        vals = A.values.copy()
        vals[pos] += d
        return A.with_values(vals)
    n = A.n_rows
    idx = np.arange(n, dtype=INDEX)
    return SparseMatrix.from_coo(
        np.concatenate([A.row_ids(), idx]),
        np.concatenate([A.col_indices, idx]),
        np.concatenate([A.values, d]),
        A.shape,
    )


def write_matrix_market(A: SparseMatrix, path) -> None:
    """Coordinate-format export with 1-based indices."""
    rows = A.row_ids() + 1
    cols = A.col_indices + 1
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate real general\n")
        fh.write(f"{A.n_rows} {A.n_cols} {A.nnz}\n")
        for r, c, v in zip(rows.tolist(), cols.tolist(), A.values.tolist()):
            fh.write(f"{r} {c} {v!r}\n")


def read_matrix_market(path) -> SparseMatrix:
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("%")]
    n_rows, n_cols, nnz = (int(t) for t in lines[0].split())
    data = np.array([ln.split() for ln in lines[1:1 + nnz]], dtype=float).reshape(-1, 3)
    return SparseMatrix.from_coo(data[:, 0] - 1, data[:, 1] - 1, data[:, 2], (n_rows, n_cols))
