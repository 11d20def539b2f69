"""Linear complementarity problems and an exhaustive-enumeration oracle."""

from __future__ import annotations

import itertools

import numpy as np

from asnewton.linalg import SparseMatrix
from asnewton.model import MCProblem

MAX_BRUTE_FORCE = 20


class NoSolutionError(RuntimeError):
    """No complementary basis yields a solution."""


def lcp(M, q, lower=None, upper=None, name: str = "lcp", x0=None, solutions=()) -> MCProblem:
    """``F(x) = M x + q`` on the box ``[lower, upper]`` (default ``[0, inf)``)."""
    M = np.atleast_2d(np.array(M, dtype=float))
    q = np.array(q, dtype=float).reshape(-1)
    n = q.size
    if M.shape != (n, n):
        raise ValueError("M must be n x n")
    lower = np.zeros(n) if lower is None else np.broadcast_to(np.asarray(lower, dtype=float), (n,))
    upper = np.full(n, np.inf) if upper is None else np.broadcast_to(np.asarray(upper, dtype=float), (n,))
    J = SparseMatrix.from_dense(M)
    M.setflags(write=False)
    q.setflags(write=False)

    def eval_f(x):
        return J @ x + q

    def eval_jacobian(x):
        return J

    return MCProblem(n, lower, upper, eval_f, eval_jacobian, name=name, x0=x0,
                     solutions=tuple(np.asarray(s, dtype=float) for s in solutions))


def random_monotone_lcp(n: int, seed: int):
    """``M = B'B + I`` and ``q`` with standard normal entries."""
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n, n))
    return B.T @ B + np.eye(n), rng.standard_normal(n)


def _complementary_solutions(M, q, tol):
    M = np.asarray(M, dtype=float)
    q = np.asarray(q, dtype=float)
    n = q.size
    if n > MAX_BRUTE_FORCE:
        raise ValueError(f"brute force enumeration limited to n <= {MAX_BRUTE_FORCE}")
    scale = tol * (1.0 + np.abs(q).max() + np.abs(M).max())
    for size in range(n + 1):
        for basis in itertools.combinations(range(n), size):
            S = list(basis)
            x = np.zeros(n)
            if S:
                try:
                    x[S] = np.linalg.solve(M[np.ix_(S, S)], -q[S])
                except np.linalg.LinAlgError:
                    continue
            if x.min() < -scale:
                continue
            w = M @ x + q
            if w.min() < -scale:
                continue
            if S and np.linalg.cond(M[np.ix_(S, S)]) > 1e12:
                continue
            yield np.maximum(x, 0.0)


def lcp_brute_force(M, q, tol: float = 1e-12) -> np.ndarray:
    """Solve ``0 <= x, Mx + q >= 0, x'(Mx + q) = 0`` by trying every basis.

    Bases are tried in order of increasing size, so the returned point is
    the first solution found; it is the unique one when ``M`` is positive
    definite.
    """
    for x in _complementary_solutions(M, q, tol):
        return x
    raise NoSolutionError("no complementary basis solves the LCP")


def lcp_all_solutions(M, q, tol: float = 1e-12) -> list:
    """All distinct basic solutions (for instances with several solutions)."""
    found = []
    for x in _complementary_solutions(M, q, tol):
        if not any(np.allclose(x, y, atol=1e-9) for y in found):
            found.append(x)
    if not found:
        raise NoSolutionError("no complementary basis solves the LCP")
    return found
