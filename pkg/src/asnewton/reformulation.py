"""Fischer-Burmeister reformulation of box complementarity problems.

Every component is mapped to a scalar equation by bound pattern:

=================  =====================================================
lower only         ``fb(x - l, F)``
upper only         ``-fb(u - x, -F)``
free               ``F``
both bounds        ``fb(x - l, -fb(u - x, -F))``
=================  =====================================================

and the generalized Jacobian is ``diag(d_a) + diag(d_b) J`` with
nonnegative diagonals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from asnewton.linalg import SparseMatrix, add_diagonal, spmv_transpose
from asnewton.model import IndexPartition, MCProblem, NumericalBreakdownError

TIE = 1.0 - 1.0 / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class DiagonalPair:
    d_a: np.ndarray
    d_b: np.ndarray


@dataclass(frozen=True)
class ActiveSetRule:
    epsilon: float
    source: str = "Dynamic"  # or "Fixed"

    def __post_init__(self):
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("epsilon must lie in [0, 1)")


def fb(a, b):
    """Fischer-Burmeister function ``a + b - sqrt(a^2 + b^2)``.

    Evaluated as ``2ab / (a + b + sqrt(a^2 + b^2))`` when ``a + b > 0`` to
    avoid cancellation; exactly zero on the complementarity set.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    r = np.hypot(a, b)
    s = a + b
    with np.errstate(invalid="ignore", divide="ignore"):
        hi, lo = np.maximum(a, b), np.minimum(a, b)  # fixed order keeps fb symmetric
        out = np.where(s > 0, 2.0 * (hi / (s + r)) * lo, s - r)
    return out[()] if out.ndim == 0 else out


def fb_partials(a, b):
    """Partial derivatives ``(1 - a/r, 1 - b/r)``; ``(1 - 1/sqrt2,) * 2`` at the origin.

    For a positive argument ``1 - a/r`` is evaluated as ``b^2 / (r (r + a))``,
    which keeps full relative accuracy when the result is tiny. Both
    arguments are first scaled by a power of two (exact, and the partials
    are scale invariant) so subnormal inputs do not lose precision in ``r``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _, e = np.frexp(np.maximum(np.abs(a), np.abs(b)))
    a = np.ldexp(a, -e)
    b = np.ldexp(b, -e)
    r = np.hypot(a, b)
    pos = r > 0
    safe = np.where(pos, r, 1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(a > 0, (b / safe) * (b / (safe + a)), 1.0 - a / safe)
        q = np.where(b > 0, (a / safe) * (a / (safe + b)), 1.0 - b / safe)
    p = np.where(pos, p, TIE)
    q = np.where(pos, q, TIE)
    if p.ndim == 0:
        return float(p), float(q)
    return p, q


def _check_f(f):
    f = np.asarray(f, dtype=float)
    if not np.isfinite(f).all():
        raise NumericalBreakdownError("non-finite F(x)")
    return f


def residual_phi(problem: MCProblem, x, f) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    f = _check_f(f)
    lo, up = problem.lower, problem.upper
    hl, hu = problem.has_lower, problem.has_upper
    phi = f.copy()

    m = hl & ~hu
    phi[m] = fb(x[m] - lo[m], f[m])
    m = ~hl & hu
    phi[m] = -fb(up[m] - x[m], -f[m])
    m = hl & hu
    inner = -fb(up[m] - x[m], -f[m])
    phi[m] = fb(x[m] - lo[m], inner)
    return phi


def merit(phi) -> float:
    phi = np.asarray(phi, dtype=float)
    return 0.5 * float(phi @ phi)


def subdiff_diagonals(problem: MCProblem, x, f) -> DiagonalPair:
    """Diagonals of one element of the B-subdifferential of ``residual_phi``."""
    x = np.asarray(x, dtype=float)
    f = _check_f(f)
    lo, up = problem.lower, problem.upper
    hl, hu = problem.has_lower, problem.has_upper
    d_a = np.zeros(problem.n)
    d_b = np.ones(problem.n)

    m = hl & ~hu
    d_a[m], d_b[m] = fb_partials(x[m] - lo[m], f[m])
    m = ~hl & hu
    d_a[m], d_b[m] = fb_partials(up[m] - x[m], -f[m])
    m = hl & hu
    a = x[m] - lo[m]
    bq = up[m] - x[m]
    r, s = fb_partials(bq, -f[m])
    p, q = fb_partials(a, -fb(bq, -f[m]))
    d_a[m] = p + q * r
    d_b[m] = q * s
    return DiagonalPair(d_a, d_b)


def assemble_subdiff(J: SparseMatrix, d: DiagonalPair) -> SparseMatrix:
    """``diag(d_a) + diag(d_b) J`` as CSR (the diagonal is always stored)."""
    return add_diagonal(J.row_scale(d.d_b), d.d_a)


def merit_gradient(J: SparseMatrix, d: DiagonalPair, phi) -> np.ndarray:
    """``H^T phi`` computed as ``d_a*phi + J^T (d_b*phi)``."""
    phi = np.asarray(phi, dtype=float)
    return d.d_a * phi + spmv_transpose(J, d.d_b * phi)


def active_epsilon(phi, J: SparseMatrix, override: Optional[float] = None) -> ActiveSetRule:
    """Threshold on ``d_b`` that shrinks to zero as the merit value does."""
    if override is not None:
        return ActiveSetRule(float(override), "Fixed")
    return ActiveSetRule(min(merit(phi), 1e-2) / (1.0 + J.norm_1()), "Dynamic")


def partition_by_db(d: DiagonalPair, rule: ActiveSetRule) -> IndexPartition:
    return IndexPartition.from_mask(d.d_b <= rule.epsilon)
