"""Five-point finite-difference discretizations of elliptic variational inequalities.

Unknowns live on the ``nx * ny`` interior nodes of a rectangle, ordered
with ``i`` (the first coordinate) fastest: ``k = j * nx + i``. Node
``(i, j)`` sits at ``((i + 1) hx, (j + 1) hy)`` and the boundary values are
zero. ``F`` is the gradient of a discrete energy

    1/2 sum_faces (h_perp / h) w_face (v_a - v_b)^2 - sum_nodes hx hy load v

so the Jacobian is the symmetric stencil matrix (plus a diagonal term for
the combustion nonlinearity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from asnewton.linalg import SparseMatrix
from asnewton.model import InvalidInputError, MCProblem

BRATU_LIMIT = 6.8


@dataclass(frozen=True)
class GridSpec:
    nx: int
    ny: int
    extent_x: float = 1.0
    extent_y: float = 1.0

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise InvalidInputError("grid needs nx, ny >= 1")
        if not (self.extent_x > 0 and self.extent_y > 0):
            raise InvalidInputError("grid extents must be positive")

    @property
    def hx(self) -> float:
        return self.extent_x / (self.nx + 1)

    @property
    def hy(self) -> float:
        return self.extent_y / (self.ny + 1)

    @property
    def n(self) -> int:
        return self.nx * self.ny

    def coordinates(self):
        """Node coordinates as two ``(ny, nx)`` arrays."""
        xi1 = (np.arange(self.nx) + 1) * self.hx
        xi2 = (np.arange(self.ny) + 1) * self.hy
        return np.meshgrid(xi1, xi2)


@dataclass(frozen=True)
class BearingParams:
    eccentricity: float = 0.9
    half_height: float = 10.0

    def __post_init__(self):
        if not 0.0 < self.eccentricity < 1.0:
            raise InvalidInputError("journal bearing eccentricity must lie in (0, 1)")
        if not self.half_height > 0.0:
            raise InvalidInputError("journal bearing half height b must be positive")


def bearing_wq(xi1, eccentricity: float):
    return (1.0 + eccentricity * np.cos(xi1)) ** 3


def bearing_wl(xi1, eccentricity: float):
    return eccentricity * np.sin(xi1)


def stencil_matrix(grid: GridSpec, wx, wy) -> SparseMatrix:
    """Stencil matrix from face weights.

    ``wx`` has shape ``(ny, nx + 1)``: ``wx[j, m]`` weights the face between
    x-nodes ``m - 1`` and ``m`` (index -1 and nx being the boundary).
    ``wy`` has shape ``(ny + 1, nx)`` analogously in y.
    """
    nx, ny = grid.nx, grid.ny
    cx = (grid.hy / grid.hx) * np.asarray(wx, dtype=float)
    cy = (grid.hx / grid.hy) * np.asarray(wy, dtype=float)
    idx = np.arange(grid.n).reshape(ny, nx)
    diag = cx[:, :-1] + cx[:, 1:] + cy[:-1, :] + cy[1:, :]

    rows = [idx.ravel()]
    cols = [idx.ravel()]
    vals = [diag.ravel()]
    # interior x-faces couple (j, m-1) and (j, m)
    a, b, w = idx[:, :-1], idx[:, 1:], -cx[:, 1:-1]
    rows += [a.ravel(), b.ravel()]
    cols += [b.ravel(), a.ravel()]
    vals += [w.ravel(), w.ravel()]
    a, b, w = idx[:-1, :], idx[1:, :], -cy[1:-1, :]
    rows += [a.ravel(), b.ravel()]
    cols += [b.ravel(), a.ravel()]
    vals += [w.ravel(), w.ravel()]
    return SparseMatrix.from_coo(np.concatenate(rows), np.concatenate(cols), np.concatenate(vals),
                                 (grid.n, grid.n))


def laplacian(grid: GridSpec) -> SparseMatrix:
    return stencil_matrix(grid, np.ones((grid.ny, grid.nx + 1)), np.ones((grid.ny + 1, grid.nx)))


def _quadratic_problem(name, grid, A, load, lower, upper, x0=None):
    """``F(v) = A v - load`` with constant Jacobian ``A``."""
    load = np.ascontiguousarray(load, dtype=float).ravel()
    load.setflags(write=False)

    def eval_f(v):
        return A @ v - load

    def eval_jacobian(v):
        return A

    return MCProblem(grid.n, lower, upper, eval_f, eval_jacobian, name=name, x0=x0, grid=grid)


def journal_bearing(grid: GridSpec, params: BearingParams = BearingParams()) -> MCProblem:
    """Pressure in a lubricated journal bearing on ``(0, 2pi) x (0, 2b)``."""
    if not (math.isclose(grid.extent_x, 2 * math.pi) and math.isclose(grid.extent_y, 2 * params.half_height)):
        grid = GridSpec(grid.nx, grid.ny, 2 * math.pi, 2 * params.half_height)
    ecc = params.eccentricity
    nx, ny = grid.nx, grid.ny
    xi1_nodes = (np.arange(nx) + 1) * grid.hx
    xi1_faces = (np.arange(nx + 1) + 0.5) * grid.hx
    wx = np.broadcast_to(bearing_wq(xi1_faces, ecc), (ny, nx + 1))
    wy = np.broadcast_to(bearing_wq(xi1_nodes, ecc), (ny + 1, nx))
    A = stencil_matrix(grid, wx, wy)
    load = grid.hx * grid.hy * np.broadcast_to(bearing_wl(xi1_nodes, ecc), (ny, nx))
    n = grid.n
    return _quadratic_problem(
        f"jbearing_{nx}x{ny}_e{ecc:g}_b{params.half_height:g}",
        grid, A, load, np.zeros(n), np.full(n, np.inf),
    )


def obstacle_lower(xi1, xi2):
    return np.sin(3.2 * xi1) * np.sin(3.3 * xi2)


def obstacle(grid: GridSpec) -> MCProblem:
    """Membrane over the obstacle ``sin(3.2 x) sin(3.3 y)`` on the unit square."""
    grid = GridSpec(grid.nx, grid.ny)
    X, Y = grid.coordinates()
    lower = obstacle_lower(X, Y).ravel()
    return _quadratic_problem(
        f"obstacle_{grid.nx}x{grid.ny}", grid, laplacian(grid), np.zeros(grid.n),
        lower, np.full(grid.n, np.inf), x0=np.maximum(lower, 0.0),
    )


def boundary_distance(xi1, xi2):
    return np.minimum(np.minimum(xi1, xi2), np.minimum(1.0 - xi1, 1.0 - xi2))


def torsion(grid: GridSpec, c: float = 5.0) -> MCProblem:
    """Elastic-plastic torsion: stress potential bounded by the distance to the boundary."""
    grid = GridSpec(grid.nx, grid.ny)
    X, Y = grid.coordinates()
    dist = boundary_distance(X, Y).ravel()
    load = np.full(grid.n, c * grid.hx * grid.hy)
    return _quadratic_problem(f"torsion_{grid.nx}x{grid.ny}_c{c:g}", grid, laplacian(grid), load,
                              -dist, dist)


def combustion(grid: GridSpec, lam: float = 5.0) -> MCProblem:
    """Bratu problem ``-lap v = lam exp(v)`` with ``v >= 0``."""
    if not 0.0 < lam < BRATU_LIMIT:
        raise InvalidInputError(f"combustion lambda must lie in (0, {BRATU_LIMIT})")
    grid = GridSpec(grid.nx, grid.ny)
    A = laplacian(grid)
    scale = lam * grid.hx * grid.hy
    diag_pos = A.diagonal_positions()
    n = grid.n

    def eval_f(v):
        return A @ v - scale * np.exp(v)

    def eval_jacobian(v):
        vals = A.values.copy()
        vals[diag_pos] -= scale * np.exp(v)
        return A.with_values(vals)

    return MCProblem(n, np.zeros(n), np.full(n, np.inf), eval_f, eval_jacobian,
                     name=f"combustion_{grid.nx}x{grid.ny}_l{lam:g}", grid=grid)
