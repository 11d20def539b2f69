"""Problem, partition, configuration and report types shared by both solvers."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, asdict
from typing import Callable, Optional, Sequence

import numpy as np

from asnewton.linalg.sparse import SparseMatrix


class InvalidInputError(ValueError):
    """Raised for malformed problems, start points or configurations."""


class NumericalBreakdownError(ArithmeticError):
    """Raised when a function evaluation produces non-finite values."""


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    BUDGET_EXHAUSTED = "LinearSolveBudgetExhausted"
    LINE_SEARCH_FAILURE = "LineSearchFailure"
    STATIONARY_OR_FAILED = "StationaryOrFailed"
    LINEAR_SOLVER_BREAKDOWN = "LinearSolverBreakdown"
    INVALID_INPUT = "InvalidInput"
    NUMERICAL_BREAKDOWN = "NumericalBreakdown"


@dataclass(frozen=True, eq=False)
class MCProblem:
    """Box-constrained complementarity problem ``lower <= x <= upper`` / ``F(x)``.

    ``eval_jacobian`` must return matrices sharing one sparsity pattern. The
    optional ``x0``, ``grid`` and ``solutions`` fields are used by the
    benchmark library: a default starting point, the grid a PDE instance was
    discretized on, and independently certified solutions when known.
    """

    n: int
    lower: np.ndarray
    upper: np.ndarray
    eval_f: Callable[[np.ndarray], np.ndarray]
    eval_jacobian: Callable[[np.ndarray], SparseMatrix]
    name: str = "problem"
    x0: Optional[np.ndarray] = None
    grid: object = None
    solutions: tuple = ()

    def __post_init__(self):
        lower = np.array(self.lower, dtype=float).reshape(-1)
        upper = np.array(self.upper, dtype=float).reshape(-1)
        if self.n < 1 or lower.shape != (self.n,) or upper.shape != (self.n,):
            raise InvalidInputError(f"{self.name}: bound vectors must have length n={self.n}")
        if np.isnan(lower).any() or np.isnan(upper).any():
            raise InvalidInputError(f"{self.name}: NaN bound")
        if (lower == np.inf).any() or (upper == -np.inf).any():
            raise InvalidInputError(f"{self.name}: lower bound +inf or upper bound -inf")
        if not (lower < upper).all():
            raise InvalidInputError(f"{self.name}: require lower < upper (fixed variables are not supported)")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if self.x0 is not None:
            x0 = np.array(self.x0, dtype=float).reshape(-1)
            if x0.shape != (self.n,):
                raise InvalidInputError(f"{self.name}: x0 must have length n")
            x0.setflags(write=False)
            object.__setattr__(self, "x0", x0)

    @property
    def has_lower(self) -> np.ndarray:
        return np.isfinite(self.lower)

    @property
    def has_upper(self) -> np.ndarray:
        return np.isfinite(self.upper)

    def start_point(self) -> np.ndarray:
        if self.x0 is not None:
            return self.x0.copy()
        return np.clip(np.zeros(self.n), self.lower, self.upper)

    def f(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.eval_f(x), dtype=float)

    def jacobian(self, x: np.ndarray) -> SparseMatrix:
        return self.eval_jacobian(x)


@dataclass(frozen=True, eq=False)
class IndexPartition:
    """Active/inactive split of ``{0, ..., n-1}``.

    ``full_to_reduced[i]`` is the position of ``i`` within ``inactive``, or
    -1 for active indices.
    """

    active: np.ndarray
    inactive: np.ndarray
    full_to_reduced: np.ndarray

    @classmethod
    def from_mask(cls, active_mask) -> "IndexPartition":
        mask = np.asarray(active_mask, dtype=bool)
        active = np.flatnonzero(mask)
        inactive = np.flatnonzero(~mask)
        f2r = np.full(mask.size, -1, dtype=np.intp)
        f2r[inactive] = np.arange(inactive.size)
        for a in (active, inactive, f2r):
            a.setflags(write=False)
        return cls(active, inactive, f2r)

    @property
    def n(self) -> int:
        return self.full_to_reduced.size

    @property
    def n_active(self) -> int:
        return self.active.size


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-8
    max_linear_solves: int = 100
    inner_rtol: float = 1e-2
    rho: float = 1e-10
    p_exp: float = 2.1
    beta: float = 0.5
    sigma: float = 1e-4
    gamma: float = 1e-12
    max_backtracks: int = 50
    epsilon_override: Optional[float] = None

    def __post_init__(self):
        checks = [
            (0 < self.beta < 1, "beta must lie in (0, 1)"),
            (0 < self.sigma < 0.5, "sigma must lie in (0, 1/2)"),
            (self.rho > 0, "rho must be positive"),
            (self.p_exp > 2, "p_exp must exceed 2"),
            (0 < self.gamma < 1, "gamma must lie in (0, 1)"),
            (self.tol >= 0, "tol must be nonnegative"),
            (self.max_linear_solves >= 0, "max_linear_solves must be nonnegative"),
            (0 < self.inner_rtol < 1, "inner_rtol must lie in (0, 1)"),
            (self.max_backtracks >= 0, "max_backtracks must be nonnegative"),
        ]
        if self.epsilon_override is not None:
            checks.append((0 <= self.epsilon_override < 1, "epsilon_override must lie in [0, 1)"))
        for ok, msg in checks:
            if not ok:
                raise InvalidInputError(msg)


@dataclass
class IterationRecord:
    iteration: int
    residual: float
    step: float
    active: int
    fallback: bool
    inner_iterations: int = 0


@dataclass
class SolverReport:
    status: Status
    outer_iterations: int = 0
    linear_solves: int = 0
    inner_iterations_total: int = 0
    final_residual: float = float("inf")
    history: list = field(default_factory=list)
    wall_time_seconds: float = 0.0

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    def to_dict(self) -> dict:
        d = asdict(self)
        d["status"] = self.status.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SolverReport":
        d = dict(d)
        d["status"] = Status(d["status"])
        d["history"] = [IterationRecord(**h) for h in d.get("history", [])]
        return cls(**d)


def _as_vector(problem: MCProblem, x) -> np.ndarray:
    x = np.array(x, dtype=float).reshape(-1)
    if x.shape != (problem.n,):
        raise InvalidInputError(f"expected a vector of length {problem.n}, got {x.shape[0]}")
    if not np.isfinite(x).all():
        raise InvalidInputError("start point has non-finite entries")
    return x


def validate_start_point(problem: MCProblem, x0: Sequence[float]) -> np.ndarray:
    """Clamp ``x0`` into the box; the reduced-space method needs a feasible start."""
    return np.clip(_as_vector(problem, x0), problem.lower, problem.upper)


def mid_residual(x: np.ndarray, f: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    return x - np.clip(x - f, lower, upper)


def complementarity_error(problem: MCProblem, x: Sequence[float]) -> float:
    """Infinity norm of ``x - clamp(x - F(x), lower, upper)`` (zero exactly at solutions)."""
    x = np.clip(np.asarray(x, dtype=float), problem.lower, problem.upper)
    f = problem.f(x)
    if not np.isfinite(f).all():
        raise NumericalBreakdownError(f"{problem.name}: non-finite F(x)")
    r = mid_residual(x, f, problem.lower, problem.upper)
    return float(np.max(np.abs(r))) if r.size else 0.0
