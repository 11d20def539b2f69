"""Preconditioners compared in the benchmark tables: none, Jacobi, ILU(0), block Jacobi."""

from __future__ import annotations

import numpy as np

from asnewton.linalg._backend import kernels
from asnewton.linalg.sparse import SparseMatrix, add_diagonal, extract_submatrix

KINDS = ("none", "jacobi", "ilu0", "bjacobi")
PIVOT_TINY = 1e-14
_ALIASES = {"identity": "none", "ilu": "ilu0", "block_jacobi": "bjacobi"}


class Preconditioner:
    kind = "none"
    replaced_pivots = 0

    def apply(self, v: np.ndarray) -> np.ndarray:
        return np.array(v, dtype=float)

    __call__ = apply

    def __repr__(self):
        return f"{type(self).__name__}(kind={self.kind!r})"


IdentityPreconditioner = Preconditioner


class JacobiPreconditioner(Preconditioner):
    kind = "jacobi"

    def __init__(self, A: SparseMatrix):
        d = A.diagonal()
        if np.any(d == 0):
            raise ZeroDivisionError("Jacobi preconditioner needs a nonzero diagonal")
        self.inv_diag = 1.0 / d

    def apply(self, v):
        return self.inv_diag * v


class ILU0Preconditioner(Preconditioner):
    """Incomplete LU restricted to the pattern of ``A`` (no fill).

    Structurally missing diagonal entries are inserted as zeros. A pivot is
    treated as zero when it is at most ``PIVOT_TINY`` times the largest entry
    of its row; it is then replaced by ``1e-12 * ||A||_inf`` and counted in
    ``replaced_pivots``.
    """

    kind = "ilu0"

    def __init__(self, A: SparseMatrix):
        if A.n_rows != A.n_cols:
            raise ValueError("ILU(0) needs a square matrix")
        pos = A.diagonal_positions()
        if np.any(pos < 0):
            A = add_diagonal(A, np.zeros(A.n_rows))
            pos = A.diagonal_positions()
        norm = A.norm_inf()
        row_max = np.zeros(A.n_rows)
        if A.nnz:
            np.maximum.at(row_max, A.row_ids(), np.abs(A.values))
        self.matrix = A
        self.diag_ptr = pos
        self.factors, self.replaced_pivots = kernels.ilu0_factor(
            A.row_offsets, A.col_indices, A.values, pos,
            PIVOT_TINY * row_max, 1e-12 * norm if norm > 0 else 1e-12,
        )
        self._schedule = kernels.trisolve_schedule(A.row_offsets, A.col_indices, pos)

    def apply(self, v):
        A = self.matrix
        return kernels.ilu0_solve(
            A.row_offsets, A.col_indices, self.factors, self.diag_ptr,
            np.ascontiguousarray(v, dtype=float), self._schedule,
        )


class BlockJacobiPreconditioner(Preconditioner):
    """ILU(0) on each of ``blocks`` contiguous, near-equal diagonal blocks."""

    kind = "bjacobi"

    def __init__(self, A: SparseMatrix, blocks: int = 4):
        if blocks < 1:
            raise ValueError("block count must be positive")
        n = A.n_rows
        nb = max(1, min(blocks, n))
        self.bounds = [int(b[0]) for b in np.array_split(np.arange(n), nb) if b.size] + [n]
        self.blocks = []
        for lo, hi in zip(self.bounds[:-1], self.bounds[1:]):
            idx = np.arange(lo, hi)
            self.blocks.append(ILU0Preconditioner(extract_submatrix(A, idx, idx)))
        self.replaced_pivots = sum(b.replaced_pivots for b in self.blocks)

    def apply(self, v):
        out = np.empty(len(v))
        for (lo, hi), blk in zip(zip(self.bounds[:-1], self.bounds[1:]), self.blocks):
            out[lo:hi] = blk.apply(v[lo:hi])
        return out


def build_preconditioner(kind: str, A: SparseMatrix, blocks: int = 4) -> Preconditioner:
    kind = _ALIASES.get(kind, kind)
    if kind == "none":
        return IdentityPreconditioner()
    if kind == "jacobi":
        return JacobiPreconditioner(A)
    if kind == "ilu0":
        return ILU0Preconditioner(A)
    if kind == "bjacobi":
        return BlockJacobiPreconditioner(A, blocks)
    raise ValueError(f"unknown preconditioner {kind!r}; expected one of {KINDS}")
