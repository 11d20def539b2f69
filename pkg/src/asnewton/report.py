"""Run specifications, report documents and the batch drivers behind the CLI."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

import numpy as np

from asnewton import __version__
from asnewton.linalg import BACKEND, LinearSolverChoice
from asnewton.model import (
    InvalidInputError,
    MCProblem,
    NumericalBreakdownError,
    SolverConfig,
    SolverReport,
    Status,
    complementarity_error,
)
from asnewton.problems import (
    BearingParams,
    GridSpec,
    combustion,
    journal_bearing,
    lcp,
    obstacle,
    random_monotone_lcp,
    small_suite,
    torsion,
)
from asnewton.problems.pde import BRATU_LIMIT
from asnewton.rsls import solve_reduced_space
from asnewton.ssls import solve_semismooth

PROBLEMS = ("jbearing", "obstacle", "torsion", "combustion", "lcp")
METHODS = {"assm": solve_semismooth, "rsls": solve_reduced_space}
TABLE2_COLUMNS = ("lu", "cg+ilu0", "cg+bjacobi")
ROBUST_TOL = 1e-6

EXIT_CODES = {
    Status.CONVERGED: 0,
    Status.BUDGET_EXHAUSTED: 2,
    Status.LINE_SEARCH_FAILURE: 3,
    Status.STATIONARY_OR_FAILED: 3,
    Status.INVALID_INPUT: 4,
    Status.NUMERICAL_BREAKDOWN: 5,
    Status.LINEAR_SOLVER_BREAKDOWN: 5,
}


@dataclass
class RunSpec:
    problem: str = "jbearing"
    nx: int = 100
    ny: int = 100
    ecc: float = 0.9
    b: float = 10.0
    c: float = 5.0
    lam: float = 5.0
    n: int = 8
    seed: int = 0
    method: str = "assm"
    ksp: str = "cg"
    pc: str = "ilu0"
    blocks: int = 4
    tol: float = SolverConfig.tol
    max_solves: int = SolverConfig.max_linear_solves
    inner_rtol: float = SolverConfig.inner_rtol
    format: str = "json"
    dump_solution: Optional[str] = None
    dump_matrix: Optional[str] = None

    def validate(self) -> "RunSpec":
        checks = [
            (self.problem in PROBLEMS, f"problem must be one of {PROBLEMS}"),
            (self.method in METHODS, f"method must be one of {tuple(METHODS)}"),
            (self.ksp in ("cg", "lu"), "ksp must be cg or lu"),
            (self.pc in ("none", "jacobi", "ilu0", "bjacobi"), "pc must be none, jacobi, ilu0 or bjacobi"),
            (self.blocks >= 1, "blocks must be positive"),
            (self.nx >= 1 and self.ny >= 1, "nx and ny must be positive"),
            (0.0 < self.ecc < 1.0, "ecc must lie in (0, 1)"),
            (self.b > 0.0, "b must be positive"),
            (0.0 < self.lam < BRATU_LIMIT, f"lambda must lie in (0, {BRATU_LIMIT})"),
            (1 <= self.n, "n must be positive"),
            (self.format in ("json", "csv"), "format must be json or csv"),
        ]
        for ok, msg in checks:
            if not ok:
                raise InvalidInputError(msg)
        self.config()
        return self

    def config(self) -> SolverConfig:
        return SolverConfig(tol=self.tol, max_linear_solves=self.max_solves, inner_rtol=self.inner_rtol)

    def linear(self) -> LinearSolverChoice:
        return LinearSolverChoice(self.ksp, self.pc, self.blocks)

    def echo(self) -> dict:
        return asdict(self)


def build_problem(spec: RunSpec) -> MCProblem:
    grid = GridSpec(spec.nx, spec.ny)
    if spec.problem == "jbearing":
        return journal_bearing(grid, BearingParams(spec.ecc, spec.b))
    if spec.problem == "obstacle":
        return obstacle(grid)
    if spec.problem == "torsion":
        return torsion(grid, spec.c)
    if spec.problem == "combustion":
        return combustion(grid, spec.lam)
    M, q = random_monotone_lcp(spec.n, spec.seed)
    return lcp(M, q, name=f"lcp{spec.n}_s{spec.seed}")


@dataclass
class ReportDocument:
    tool: str
    version: str
    backend: str
    run: dict
    problem: str
    n: int
    report: SolverReport
    complementarity_error: float

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.report.status]

    def to_dict(self, with_timing: bool = True) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["run"] = dict(self.run)
        d["report"] = self.report.to_dict()
        if not with_timing:
            d["report"].pop("wall_time_seconds")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ReportDocument":
        names = {f.name for f in fields(cls)}
        if set(d) != names:
            raise ValueError(f"report fields {sorted(d)} do not match {sorted(names)}")
        d = dict(d)
        d["report"] = SolverReport.from_dict(d["report"])
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        return cls.from_dict(json.loads(text))


SUMMARY_COLUMNS = ("problem", "method", "ksp", "pc", "status", "outer_iterations", "linear_solves",
                   "inner_iterations_total", "final_residual", "complementarity_error", "wall_time_seconds")


def _summary_row(doc: ReportDocument) -> dict:
    r = doc.report
    return {
        "problem": doc.problem, "method": doc.run["method"], "ksp": doc.run["ksp"], "pc": doc.run["pc"],
        "status": r.status.value, "outer_iterations": r.outer_iterations, "linear_solves": r.linear_solves,
        "inner_iterations_total": r.inner_iterations_total, "final_residual": r.final_residual,
        "complementarity_error": doc.complementarity_error, "wall_time_seconds": r.wall_time_seconds,
    }


def _fmt(v):
    # repr gives the shortest round-trip form for floats
    return repr(v) if isinstance(v, float) else v


def rows_to_csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: _fmt(row[k]) for k in columns})
    return buf.getvalue()


def _safe_error(problem, x) -> float:
    try:
        return complementarity_error(problem, x)
    except NumericalBreakdownError:
        return math.inf


def run_single(spec: RunSpec, problem: Optional[MCProblem] = None):
    """Solve one instance; returns ``(ReportDocument, x, problem)``."""
    spec.validate()
    problem = problem or build_problem(spec)
    x, rep = METHODS[spec.method](problem, None, spec.config(), spec.linear())
    doc = ReportDocument(
        tool="asnewton", version=__version__, backend=BACKEND, run=spec.echo(),
        problem=problem.name, n=problem.n, report=rep, complementarity_error=_safe_error(problem, x),
    )
    return doc, x, problem


def write_solution_csv(problem: MCProblem, x, path) -> None:
    """``i,j,xi1,xi2,value`` rows; grid problems are written j-major, i fastest."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j", "xi1", "xi2", "value"])
        grid = problem.grid
        if grid is None:
            for k, v in enumerate(np.asarray(x).tolist()):
                w.writerow([k, 0, "", "", repr(v)])
            return
        X, Y = grid.coordinates()
        vals = np.asarray(x).reshape(grid.ny, grid.nx)
        for j in range(grid.ny):
            for i in range(grid.nx):
                w.writerow([i, j, repr(float(X[j, i])), repr(float(Y[j, i])), repr(float(vals[j, i]))])


def _column_spec(base: RunSpec, column: str) -> RunSpec:
    ksp, _, pc = column.partition("+")
    spec = RunSpec(**{**base.echo(), "ksp": ksp, "pc": pc or base.pc, "dump_solution": None, "dump_matrix": None})
    return spec.validate()


def run_table2(base: RunSpec, columns=TABLE2_COLUMNS) -> dict:
    """Same problem under several linear solvers, plus pairwise solution agreement."""
    base.validate()
    problem = build_problem(base)
    docs, sols = [], {}
    for col in columns:
        doc, x, _ = run_single(_column_spec(base, col), problem)
        docs.append((col, doc))
        sols[col] = x
    pairwise = {
        f"{a}|{b}": float(np.max(np.abs(sols[a] - sols[b]))) for a, b in itertools.combinations(columns, 2)
    }
    rows = []
    for col, doc in docs:
        row = _summary_row(doc)
        row["column"] = col
        rows.append(row)
    return {
        "tool": "asnewton",
        "version": __version__,
        "problem": problem.name,
        "method": base.method,
        "rows": rows,
        "pairwise_max_abs_difference": pairwise,
        "max_pairwise_difference": max(pairwise.values(), default=0.0),
    }


TABLE2_CSV_COLUMNS = ("column",) + SUMMARY_COLUMNS


@dataclass
class RobustnessSummary:
    version: str
    linear: dict
    methods: dict = field(default_factory=dict)
    instances: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RobustnessSummary":
        names = {f.name for f in fields(cls)}
        if set(d) != names:
            raise ValueError("unexpected robustness summary fields")
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RobustnessSummary":
        return cls.from_dict(json.loads(text))

    def fraction(self, method: str) -> float:
        return self.methods[method]["fraction"]


def run_robustness(linear: Optional[LinearSolverChoice] = None, config: Optional[SolverConfig] = None,
                   problems=None) -> RobustnessSummary:
    """Both methods on the bundled suite; success = Converged with error <= 1e-6."""
    linear = linear or LinearSolverChoice()
    config = config or SolverConfig()
    problems = small_suite() if problems is None else problems
    summary = RobustnessSummary(version=__version__, linear=asdict(linear))
    for method, solver in METHODS.items():
        solved, failures = 0, []
        for prob in problems:
            x, rep = solver(prob, None, config, linear)
            err = _safe_error(prob, x)
            ok = rep.status is Status.CONVERGED and err <= ROBUST_TOL
            match = None
            if prob.solutions:
                match = bool(min(float(np.max(np.abs(x - s))) for s in prob.solutions) <= ROBUST_TOL)
            solved += ok
            if not ok:
                failures.append(prob.name)
            summary.instances.append({
                "problem": prob.name, "method": method, "status": rep.status.value,
                "outer_iterations": rep.outer_iterations, "linear_solves": rep.linear_solves,
                "complementarity_error": err, "success": ok, "matches_certified": match,
            })
        summary.methods[method] = {
            "solved": solved, "total": len(problems), "fraction": solved / len(problems), "failures": failures,
        }
    return summary


ROBUSTNESS_CSV_COLUMNS = ("problem", "method", "status", "outer_iterations", "linear_solves",
                          "complementarity_error", "success", "matches_certified")
