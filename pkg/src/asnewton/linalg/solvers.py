"""Preconditioned conjugate gradients and a pivoted LU fallback."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import lapack

from asnewton.linalg.precond import (
    _ALIASES,
    KINDS,
    IdentityPreconditioner,
    Preconditioner,
    build_preconditioner,
)
from asnewton.linalg.sparse import SparseMatrix, spmv


class LinearSolverBreakdownError(ArithmeticError):
    """Raised by :func:`dense_lu_solve` for numerically singular matrices."""


@dataclass
class LinearSolveStats:
    iterations: int = 0
    achieved_relative_residual: float = 0.0
    breakdown_flag: bool = False


def cg_solve(
    A: SparseMatrix,
    b,
    M: Optional[Preconditioner] = None,
    rtol: float = 1e-8,
    max_iter: Optional[int] = None,
):
    """Solve ``A x = b`` for symmetric ``A`` by preconditioned CG from ``x = 0``.

    Stops when ``||b - A x||_2 <= rtol * ||b||_2``. A nonpositive curvature
    ``p'Ap <= 0`` (or ``r'z <= 0`` from an indefinite preconditioner) and
    hitting ``max_iter`` both set ``breakdown_flag``; the iterate with the
    smallest residual seen so far is returned in that case.
    """
    b = np.ascontiguousarray(b, dtype=float)
    n = b.size
    if A.shape != (n, n):
        raise ValueError("dimension mismatch between matrix and right-hand side")
    if M is None:
        M = IdentityPreconditioner()
    if max_iter is None:
        max_iter = max(10 * n, 100)
    x = np.zeros(n)
    bnorm = float(np.linalg.norm(b))
    stats = LinearSolveStats()
    if bnorm == 0.0:
        return x, stats
    target = rtol * bnorm

    r = b.copy()
    rnorm = bnorm
    best_x, best_rnorm = x.copy(), rnorm
    z = M.apply(r)
    rz = float(r @ z)
    p = z.copy()
    k = 0
    while rnorm > target:
        if k >= max_iter or not rz > 0.0:
            stats.breakdown_flag = True
            break
        Ap = spmv(A, p)
        pAp = float(p @ Ap)
        if not pAp > 0.0:
            stats.breakdown_flag = True
            break
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        k += 1
        rnorm = float(np.linalg.norm(r))
        if rnorm < best_rnorm:
            best_x, best_rnorm = x.copy(), rnorm
        if rnorm <= target:
            break
        z = M.apply(r)
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new

    if stats.breakdown_flag:
        x = best_x
    stats.iterations = k
    stats.achieved_relative_residual = float(np.linalg.norm(b - spmv(A, x))) / bnorm
    if not np.isfinite(x).all():
        stats.breakdown_flag = True
    return x, stats


def _bandwidths(A: SparseMatrix):
    if A.nnz == 0:
        return 0, 0
    off = A.col_indices - A.row_ids()
    return int(max(0, -off.min())), int(max(0, off.max()))


def dense_lu_solve(A: SparseMatrix, b, max_dense: int = 20000) -> np.ndarray:
    """Solve ``A x = b`` by LU with partial pivoting.

    Matrices whose bandwidth makes band storage cheaper are factorized in
    LAPACK band format (same pivoting, no dense n-by-n array); others are
    densified, which is refused above ``max_dense`` rows. A pivot below
    ``1e-14 * max|A|`` raises :class:`LinearSolverBreakdownError`.
    """
    b = np.asarray(b, dtype=float)
    n = A.n_rows
    if A.shape != (n, n) or b.shape != (n,):
        raise ValueError("dimension mismatch")
    if n == 0:
        return np.zeros(0)
    amax = float(np.abs(A.values).max()) if A.nnz else 0.0
    if amax == 0.0:
        raise LinearSolverBreakdownError("zero matrix")
    threshold = 1e-14 * amax
    kl, ku = _bandwidths(A)
    ldab = 2 * kl + ku + 1
    if ldab < n // 2:
        ab = np.zeros((ldab, n), order="F")
        rows = A.row_ids()
        ab[kl + ku + rows - A.col_indices, A.col_indices] = A.values
        lub, piv, info = lapack.dgbtrf(ab, kl, ku)
        pivots = lub[kl + ku, :]
        if info > 0 or np.min(np.abs(pivots)) < threshold:
            raise LinearSolverBreakdownError("numerically singular matrix")
        x, info = lapack.dgbtrs(lub, kl, ku, b, piv)
    else:
        if n > max_dense:
            raise ValueError(f"matrix of order {n} exceeds the dense LU cap {max_dense}")
        lu, piv, info = lapack.dgetrf(A.to_dense())
        if info > 0 or np.min(np.abs(np.diag(lu))) < threshold:
            raise LinearSolverBreakdownError("numerically singular matrix")
        x, info = lapack.dgetrs(lu, piv, b)
    if info != 0 or not np.isfinite(x).all():
        raise LinearSolverBreakdownError("LU solve failed")
    return x


@dataclass(frozen=True)
class LinearSolverChoice:
    """Inner solver used by the Newton methods: ``ksp`` in {cg, lu} plus a preconditioner for CG."""

    ksp: str = "cg"
    pc: str = "ilu0"
    blocks: int = 4
    max_iter: Optional[int] = None

    def __post_init__(self):
        if self.ksp not in ("cg", "lu"):
            raise ValueError(f"unknown ksp {self.ksp!r}")
        if _ALIASES.get(self.pc, self.pc) not in KINDS:
            raise ValueError(f"unknown preconditioner {self.pc!r}")
        if self.blocks < 1:
            raise ValueError("blocks must be positive")

    def solve(self, A: SparseMatrix, b, rtol: float):
        """Return ``(x, stats)``; failures are reported through ``stats.breakdown_flag``."""
        b = np.asarray(b, dtype=float)
        if b.size == 0:
            return np.zeros(0), LinearSolveStats()
        if self.ksp == "lu":
            try:
                x = dense_lu_solve(A, b)
            except (LinearSolverBreakdownError, ValueError):
                return np.zeros_like(b), LinearSolveStats(0, 1.0, True)
            bnorm = float(np.linalg.norm(b))
            rel = float(np.linalg.norm(b - spmv(A, x))) / bnorm if bnorm > 0 else 0.0
            return x, LinearSolveStats(1, rel, False)
        try:
            M = build_preconditioner(self.pc, A, self.blocks)
        except ZeroDivisionError:
            return np.zeros_like(b), LinearSolveStats(0, 1.0, True)
        return cg_solve(A, b, M, rtol=rtol, max_iter=self.max_iter)
