"""Active-set semismooth Newton method on the Fischer-Burmeister reformulation."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from asnewton.linalg import (
    LinearSolverChoice,
    LinearSolveStats,
    SparseMatrix,
    add_diagonal,
    extract_submatrix,
    spmv,
)
from asnewton.model import (
    IndexPartition,
    IterationRecord,
    MCProblem,
    InvalidInputError,
    SolverConfig,
    SolverReport,
    Status,
)
from asnewton.reformulation import (
    DiagonalPair,
    active_epsilon,
    merit,
    merit_gradient,
    partition_by_db,
    residual_phi,
    subdiff_diagonals,
)

DA_FLOOR = 1e-10


@dataclass
class SemismoothState:
    x: np.ndarray
    f: np.ndarray
    phi: np.ndarray
    psi: float
    diag: Optional[DiagonalPair] = None
    partition: Optional[IndexPartition] = None
    direction: Optional[np.ndarray] = None
    grad_psi: Optional[np.ndarray] = None
    k: int = 0


def reduced_newton_matrix(J: SparseMatrix, diag: DiagonalPair, part: IndexPartition) -> SparseMatrix:
    """``diag(d_a/d_b)_II + J_II``: symmetric whenever ``J`` is."""
    I = part.inactive
    return add_diagonal(extract_submatrix(J, I, I), diag.d_a[I] / diag.d_b[I])


def semismooth_direction(state: SemismoothState, J: SparseMatrix, linear: LinearSolverChoice,
                         inner_rtol: float):
    """Newton direction with active components from the diagonal block alone.

    Active: ``d_A = -phi_A / d_a_A``. Inactive: the reduced system
    ``(diag(d_a/d_b)_II + J_II) d_I = -(phi/d_b)_I - J_IA d_A``.
    """
    diag, part, phi = state.diag, state.partition, state.phi
    A, I = part.active, part.inactive
    d = np.zeros(phi.size)
    d[A] = -phi[A] / np.maximum(diag.d_a[A], DA_FLOOR)
    if I.size == 0:
        return d, LinearSolveStats()
    rhs = -phi[I] / diag.d_b[I]
    if A.size:
        rhs -= spmv(J, d)[I]
    dI, stats = linear.solve(reduced_newton_matrix(J, diag, part), rhs, inner_rtol)
    d[I] = dI
    return d, stats


def descent_test(grad_psi, d, rho: float, p_exp: float) -> bool:
    d = np.asarray(d, dtype=float)
    return bool(float(np.dot(grad_psi, d)) <= -rho * float(np.linalg.norm(d)) ** p_exp)


def armijo_search(problem: MCProblem, state: SemismoothState, d, beta: float, sigma: float,
                  max_backtracks: int):
    """Smallest ``i`` with ``psi(x + beta^i d) <= psi(x) + sigma beta^i grad'd``.

    Returns ``(step, x, f, phi)`` or ``None`` when no ``i <= max_backtracks``
    works. Trial points with non-finite ``F`` are rejected. A trial that
    does not lower the merit value strictly is also rejected, which only
    matters when the sufficient-decrease term is below roundoff.
    """
    slope = float(np.dot(state.grad_psi, d))
    step = 1.0
    for _ in range(max_backtracks + 1):
        xt = state.x + step * d
        with np.errstate(all="ignore"):
            ft = problem.f(xt)
        if np.isfinite(ft).all():
            phit = residual_phi(problem, xt, ft)
            psit = merit(phit)
            if psit <= state.psi + sigma * step * slope and (psit < state.psi or state.psi == 0.0):
                return step, xt, ft, phit
        step *= beta
    return None


def solve_semismooth(problem: MCProblem, x0=None, config: Optional[SolverConfig] = None,
                     linear: Optional[LinearSolverChoice] = None):
    """Run the active-set semismooth method; returns ``(x, SolverReport)``."""
    config = config or SolverConfig()
    linear = linear or LinearSolverChoice()
    x = problem.start_point() if x0 is None else np.array(x0, dtype=float).reshape(-1)
    if x.shape != (problem.n,) or not np.isfinite(x).all():
        raise InvalidInputError("start point must be a finite vector of length n")

    report = SolverReport(Status.INVALID_INPUT)
    t0 = time.perf_counter()
    with np.errstate(all="ignore"):
        f = problem.f(x)
    if not np.isfinite(f).all():
        report.wall_time_seconds = time.perf_counter() - t0
        return x, report
    phi = residual_phi(problem, x, f)
    state = SemismoothState(x, f, phi, merit(phi))

    while True:
        norm = float(np.linalg.norm(state.phi))
        report.final_residual = norm
        if norm <= config.tol:
            report.status = Status.CONVERGED
            break
        if report.linear_solves >= config.max_linear_solves:
            report.status = Status.BUDGET_EXHAUSTED
            break

        J = problem.jacobian(state.x)
        state.diag = subdiff_diagonals(problem, state.x, state.f)
        state.grad_psi = merit_gradient(J, state.diag, state.phi)
        rule = active_epsilon(state.phi, J, config.epsilon_override)
        state.partition = partition_by_db(state.diag, rule)

        d, stats = semismooth_direction(state, J, linear, config.inner_rtol)
        report.linear_solves += 1
        report.inner_iterations_total += stats.iterations

        fallback = not (np.isfinite(d).all() and descent_test(state.grad_psi, d, config.rho, config.p_exp))
        if fallback:
            d = -state.grad_psi
            if not np.any(d):
                report.status = Status.STATIONARY_OR_FAILED
                break
        state.direction = d

        found = armijo_search(problem, state, d, config.beta, config.sigma, config.max_backtracks)
        if found is None:
            report.status = Status.LINE_SEARCH_FAILURE
            break
        step, xn, fn, phin = found
        report.history.append(IterationRecord(
            iteration=state.k,
            residual=norm,
            step=step,
            active=state.partition.n_active,
            fallback=fallback,
            inner_iterations=stats.iterations,
        ))
        state = SemismoothState(xn, fn, phin, merit(phin), k=state.k + 1)
        report.outer_iterations = state.k

    report.wall_time_seconds = time.perf_counter() - t0
    return state.x, report
