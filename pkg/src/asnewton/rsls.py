"""Active-set reduced-space Newton method with a projected line search.

Iterates stay inside the box. The active set holds variables sitting on a
bound with ``F`` pushing outward; the Newton system is solved on the rest.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from asnewton.linalg import LinearSolverChoice, LinearSolveStats, SparseMatrix, extract_submatrix
from asnewton.model import (
    IndexPartition,
    IterationRecord,
    MCProblem,
    SolverConfig,
    SolverReport,
    Status,
    validate_start_point,
)


@dataclass
class ReducedSpaceState:
    x: np.ndarray
    f: np.ndarray
    fomega: np.ndarray
    partition: Optional[IndexPartition] = None
    direction: Optional[np.ndarray] = None
    fallback_stage: str = "Newton"  # or "GradientFallback"
    k: int = 0


def project(problem: MCProblem, x) -> np.ndarray:
    return np.clip(x, problem.lower, problem.upper)


def projected_residual(problem: MCProblem, x, f) -> np.ndarray:
    """``F`` with components blocked by an active bound clipped to zero."""
    x = np.asarray(x, dtype=float)
    out = np.array(f, dtype=float)
    at_lo = x == problem.lower
    at_up = x == problem.upper
    out[at_lo] = np.minimum(out[at_lo], 0.0)
    out[at_up] = np.maximum(out[at_up], 0.0)
    return out


def partition_reduced(problem: MCProblem, x, f) -> IndexPartition:
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=float)
    active = ((x == problem.lower) & (f > 0)) | ((x == problem.upper) & (f < 0))
    return IndexPartition.from_mask(active)


def reduced_direction(state: ReducedSpaceState, J: SparseMatrix, linear: LinearSolverChoice,
                      inner_rtol: float):
    """``d_A = 0`` and ``J_II d_I = -F_I`` solved to ``inner_rtol``."""
    I = state.partition.inactive
    d = np.zeros(state.x.size)
    if I.size == 0:
        return d, LinearSolveStats()
    dI, stats = linear.solve(extract_submatrix(J, I, I), -state.f[I], inner_rtol)
    d[I] = dI
    return d, stats


def max_backtrack_index(beta: float, gamma: float) -> int:
    """Largest ``j`` with ``beta**j > gamma``."""
    j = math.floor(math.log(gamma) / math.log(beta))
    while beta ** j <= gamma:
        j -= 1
    while beta ** (j + 1) > gamma:
        j += 1
    return j


def projected_search(problem: MCProblem, state: ReducedSpaceState, d, beta: float, sigma: float,
                     gamma: float):
    """Backtrack on ``||F_Omega(pi[x + beta^j d])|| <= (1 - sigma beta^j) ||F_Omega(x)||``.

    Returns ``(step, x, f, fomega)`` or ``None`` once ``beta^j <= gamma``.
    """
    current = float(np.linalg.norm(state.fomega))
    for j in range(max_backtrack_index(beta, gamma) + 1):
        step = beta ** j
        xt = project(problem, state.x + step * d)
        with np.errstate(all="ignore"):
            ft = problem.f(xt)
        if not np.isfinite(ft).all():
            continue
        fo = projected_residual(problem, xt, ft)
        if float(np.linalg.norm(fo)) <= (1.0 - sigma * step) * current:
            return step, xt, ft, fo
    return None


def solve_reduced_space(problem: MCProblem, x0=None, config: Optional[SolverConfig] = None,
                        linear: Optional[LinearSolverChoice] = None):
    """Run the reduced-space method from ``x0`` clamped into the box."""
    config = config or SolverConfig()
    linear = linear or LinearSolverChoice()
    x = validate_start_point(problem, problem.start_point() if x0 is None else x0)

    report = SolverReport(Status.NUMERICAL_BREAKDOWN)
    t0 = time.perf_counter()
    with np.errstate(all="ignore"):
        f = problem.f(x)
    if not np.isfinite(f).all():
        report.wall_time_seconds = time.perf_counter() - t0
        return x, report
    state = ReducedSpaceState(x, f, projected_residual(problem, x, f))

    while True:
        norm = float(np.linalg.norm(state.fomega))
        report.final_residual = norm
        if norm <= config.tol:
            report.status = Status.CONVERGED
            break
        if report.linear_solves >= config.max_linear_solves:
            report.status = Status.BUDGET_EXHAUSTED
            break

        J = problem.jacobian(state.x)
        state.partition = partition_reduced(problem, state.x, state.f)
        d, stats = reduced_direction(state, J, linear, config.inner_rtol)
        report.linear_solves += 1
        report.inner_iterations_total += stats.iterations

        found = None
        if not stats.breakdown_flag and np.isfinite(d).all():
            state.fallback_stage = "Newton"
            found = projected_search(problem, state, d, config.beta, config.sigma, config.gamma)
        if found is None:
            state.fallback_stage = "GradientFallback"
            d = -state.f
            found = projected_search(problem, state, d, config.beta, config.sigma, config.gamma)
        if found is None:
            report.status = Status.STATIONARY_OR_FAILED
            break
        state.direction = d
        step, xn, fn, fon = found
        report.history.append(IterationRecord(
            iteration=state.k,
            residual=norm,
            step=step,
            active=state.partition.n_active,
            fallback=state.fallback_stage != "Newton",
            inner_iterations=stats.iterations,
        ))
        state = ReducedSpaceState(xn, fn, fon, k=state.k + 1)
        report.outer_iterations = state.k

    report.wall_time_seconds = time.perf_counter() - t0
    return state.x, report
