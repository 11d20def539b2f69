"""Benchmark problem generators."""

from asnewton.problems.lcp import (
    NoSolutionError,
    lcp,
    lcp_all_solutions,
    lcp_brute_force,
    random_monotone_lcp,
)
from asnewton.problems.pde import (
    BearingParams,
    GridSpec,
    bearing_wl,
    bearing_wq,
    boundary_distance,
    combustion,
    journal_bearing,
    laplacian,
    obstacle,
    obstacle_lower,
    stencil_matrix,
    torsion,
)
from asnewton.problems.suite import josephy, small_suite

__all__ = [
    "BearingParams",
    "GridSpec",
    "NoSolutionError",
    "bearing_wl",
    "bearing_wq",
    "boundary_distance",
    "combustion",
    "josephy",
    "journal_bearing",
    "laplacian",
    "lcp",
    "lcp_all_solutions",
    "lcp_brute_force",
    "obstacle",
    "obstacle_lower",
    "random_monotone_lcp",
    "small_suite",
    "stencil_matrix",
    "torsion",
]
