"""Active-set Newton methods for nonlinear and mixed complementarity problems."""

__version__ = "0.1.0"

from asnewton.linalg import BACKEND, LinearSolverChoice, SparseMatrix
from asnewton.model import (
    IndexPartition,
    InvalidInputError,
    MCProblem,
    NumericalBreakdownError,
    SolverConfig,
    SolverReport,
    Status,
    complementarity_error,
    validate_start_point,
)
from asnewton.rsls import solve_reduced_space
from asnewton.ssls import solve_semismooth

__all__ = [
    "BACKEND",
    "IndexPartition",
    "InvalidInputError",
    "LinearSolverChoice",
    "MCProblem",
    "NumericalBreakdownError",
    "SolverConfig",
    "SolverReport",
    "SparseMatrix",
    "Status",
    "__version__",
    "complementarity_error",
    "solve_reduced_space",
    "solve_semismooth",
    "validate_start_point",
]
