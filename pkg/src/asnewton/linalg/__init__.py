"""Sparse linear algebra: CSR storage, conjugate gradients, ILU(0) and block Jacobi."""

from asnewton.linalg._backend import BACKEND
from asnewton.linalg.precond import (
    KINDS,
    BlockJacobiPreconditioner,
    IdentityPreconditioner,
    ILU0Preconditioner,
    JacobiPreconditioner,
    Preconditioner,
    build_preconditioner,
)
from asnewton.linalg.solvers import (
    LinearSolverBreakdownError,
    LinearSolveStats,
    LinearSolverChoice,
    cg_solve,
    dense_lu_solve,
)
from asnewton.linalg.sparse import (
    SparseMatrix,
    add_diagonal,
    extract_submatrix,
    read_matrix_market,
    spmv,
    spmv_transpose,
    write_matrix_market,
)

__all__ = [
    "BACKEND",
    "KINDS",
    "BlockJacobiPreconditioner",
    "IdentityPreconditioner",
    "ILU0Preconditioner",
    "JacobiPreconditioner",
    "LinearSolveStats",
    "LinearSolverChoice",
    "LinearSolverBreakdownError",
    "Preconditioner",
    "SparseMatrix",
    "add_diagonal",
    "build_preconditioner",
    "cg_solve",
    "dense_lu_solve",
    "extract_submatrix",
    "read_matrix_market",
    "spmv",
    "spmv_transpose",
    "write_matrix_market",
]
