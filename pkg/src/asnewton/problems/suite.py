"""Bundled small-problem suite for robustness runs.

Each instance carries either ``solutions`` (certified by enumeration or by
substitution) or none, in which case a run is certified by the
complementarity error of the returned point.
"""

from __future__ import annotations

import numpy as np

from asnewton.linalg import SparseMatrix
from asnewton.model import MCProblem
from asnewton.problems.lcp import lcp, lcp_all_solutions, lcp_brute_force, random_monotone_lcp
from asnewton.problems.pde import BearingParams, GridSpec, combustion, journal_bearing, obstacle, torsion


def josephy() -> MCProblem:
    """Four-variable nonlinear NCP.

    Two solutions, checked by substitution: ``(sqrt(6)/2, 0, 0, 1/2)``
    (degenerate in the third component) and ``(1, 0, 3, 0)``.
    """

    def f(x):
        x1, x2, x3, x4 = x
        return np.array([
            3 * x1**2 + 2 * x1 * x2 + 2 * x2**2 + x3 + 3 * x4 - 6,
            2 * x1**2 + x1 + x2**2 + 10 * x3 + 2 * x4 - 2,
            3 * x1**2 + x1 * x2 + 2 * x2**2 + 2 * x3 + 9 * x4 - 9,
            x1**2 + 3 * x2**2 + 2 * x3 + 3 * x4 - 3,
        ])

    def jac(x):
        x1, x2, x3, x4 = x
        return SparseMatrix.from_coo(
            np.repeat(np.arange(4), 4), np.tile(np.arange(4), 4),
            [6 * x1 + 2 * x2, 2 * x1 + 4 * x2, 1, 3,
             4 * x1 + 1, 2 * x2, 10, 2,
             6 * x1 + x2, x1 + 4 * x2, 2, 9,
             2 * x1, 6 * x2, 2, 3],
            (4, 4),
        )

    sols = (np.array([np.sqrt(6.0) / 2, 0.0, 0.0, 0.5]), np.array([1.0, 0.0, 3.0, 0.0]))
    return MCProblem(4, np.zeros(4), np.full(4, np.inf), f, jac, name="josephy",
                     x0=np.ones(4), solutions=sols)


def _certified_lcp(M, q, name, **kw):
    return lcp(M, q, name=name, solutions=lcp_all_solutions(M, q), **kw)


def small_suite() -> list:
    probs = []
    inf = np.inf

    # scalars covering every bound pattern
    probs.append(lcp([[1.0]], [1.0], name="scalar_boundary", solutions=[[0.0]]))
    probs.append(lcp([[1.0]], [-1.0], name="scalar_interior", solutions=[[1.0]]))
    probs.append(lcp([[1.0]], [0.0], name="scalar_degenerate", solutions=[[0.0]]))
    probs.append(lcp([[0.0]], [-1.0], lower=0.0, upper=1.0, name="box_scalar_upper", solutions=[[1.0]]))
    probs.append(lcp([[2.0]], [-1.0], lower=-1.0, upper=1.0, name="box_scalar_interior", solutions=[[0.5]]))
    probs.append(lcp([[3.0]], [-6.0], lower=-inf, upper=inf, name="free_scalar", solutions=[[2.0]]))
    probs.append(lcp([[1.0]], [-3.0], lower=-inf, upper=1.0, name="upper_only_scalar", solutions=[[1.0]]))

    # small LCPs with known answers
    probs.append(_certified_lcp([[2.0, 1.0], [1.0, 2.0]], [-3.0, -3.0], "lcp2_interior"))
    probs.append(_certified_lcp(np.eye(2), [1.0, -2.0], "lcp2_identity"))
    probs.append(_certified_lcp(np.eye(2), [0.0, -1.0], "lcp2_degenerate"))
    tri = np.array([[2.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 2.0]])
    probs.append(_certified_lcp(tri, [-2.0, -1.0, 1.0], "lcp3_degenerate"))
    nonmono = np.array([[1.0, 2.0, 0.0, 0.0], [2.0, 1.0, 0.0, 0.0], [0.0, 0.0, 2.0, 1.0], [0.0, 0.0, 1.0, 2.0]])
    probs.append(_certified_lcp(nonmono, [-1.0, -1.0, -3.0, -3.0], "lcp4_nonmonotone"))

    # random strongly monotone LCPs, certified by enumeration
    for n, seed in [(4, 11), (5, 12), (6, 13), (8, 14), (10, 15), (12, 16)]:
        M, q = random_monotone_lcp(n, seed)
        probs.append(lcp(M, q, name=f"lcp{n}_monotone_s{seed}", solutions=[lcp_brute_force(M, q)]))

    # box-constrained and mixed-bound problems, certified by complementarity error
    M, q = random_monotone_lcp(6, 21)
    probs.append(lcp(M, 3 * q, lower=0.0, upper=0.5, name="box_lcp6"))
    M, q = random_monotone_lcp(4, 22)
    probs.append(lcp(M, 3 * q, lower=[0.0, -inf, -1.0, -inf], upper=[inf, 1.0, 1.0, inf], name="mixed_bounds4"))

    probs.append(josephy())

    # coarse PDE instances
    probs.append(torsion(GridSpec(6, 6)))
    probs.append(obstacle(GridSpec(8, 8)))
    probs.append(journal_bearing(GridSpec(8, 8), BearingParams(0.5, 10.0)))
    probs.append(combustion(GridSpec(6, 6), lam=6.0))
    return probs
