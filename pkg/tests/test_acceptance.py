"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the detail lines;
a summary block is printed at the end of every session either way.
"""

import math
import time

import numpy as np
import pytest

from asnewton.cli import main as cli_main
from asnewton.linalg import LinearSolverChoice, SparseMatrix
from asnewton.model import MCProblem, SolverConfig, Status, complementarity_error
from asnewton.problems import (
    BearingParams,
    GridSpec,
    combustion,
    journal_bearing,
    lcp,
    lcp_brute_force,
    obstacle,
    random_monotone_lcp,
    small_suite,
    torsion,
)
from asnewton.reformulation import (
    ActiveSetRule,
    fb,
    fb_partials,
    merit,
    merit_gradient,
    partition_by_db,
    residual_phi,
    subdiff_diagonals,
)
from asnewton.report import RobustnessSummary, run_robustness
from asnewton.rsls import solve_reduced_space
from asnewton.ssls import SemismoothState, semismooth_direction, solve_semismooth

SOLVERS = {"assm": solve_semismooth, "rsls": solve_reduced_space}


def verdict(number, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    assert ok, detail


def test_criterion_01_ncp_function_law(rng):
    t0 = time.perf_counter()
    grid = [-1e300, -3.0, -1.0, -1e-300, 0.0, 1e-300, 1.0, 3.0, 1e300]
    a = np.array([p for p in grid for _ in grid])
    b = np.array([q for _ in grid for q in grid])
    m = 10_000
    ra = rng.standard_normal(m) * 10.0 ** rng.integers(-8, 8, m)
    rb = rng.standard_normal(m) * 10.0 ** rng.integers(-8, 8, m)
    ra[: m // 4] = np.abs(ra[: m // 4])
    rb[: m // 4] = 0.0
    rb[m // 4: m // 2] = np.abs(rb[m // 4: m // 2])
    ra[m // 4: m // 2] = 0.0
    a, b = np.concatenate([a, ra]), np.concatenate([b, rb])
    v = fb(a, b)
    comp = (a >= 0) & (b >= 0) & ((a == 0) | (b == 0))
    forward = float(np.abs(v[comp]).max())
    reverse = bool(np.all(v[~comp] != 0))
    p, q = fb_partials(a, b)
    ball = float(((1 - p) ** 2 + (1 - q) ** 2).max())
    in_range = bool(np.all((p >= 0) & (p <= 2) & (q >= 0) & (q <= 2)))
    elapsed = time.perf_counter() - t0
    ok = forward <= 1e-12 and reverse and ball <= 1 + 1e-12 and in_range and elapsed < 1.0
    verdict(1, ok, f"{a.size} pairs, max|fb| on set {forward:.1e}, nonzero off set {reverse}, "
                   f"max ball {ball:.15f}, {elapsed:.3f}s")


def test_criterion_02_box_reformulation(rng):
    t0 = time.perf_counter()
    m = 10_000
    l = rng.uniform(-5, 5, m)
    u = l + rng.uniform(1e-3, 10, m)
    t = rng.uniform(0.01, 0.99, m)
    mag = rng.uniform(1e-3, 10, m)
    regime = rng.integers(0, 7, m)
    interior = l + t * (u - l)
    side = rng.random(m) < 0.5
    x = np.select([regime == 0, regime == 1, regime == 3, regime == 4, regime == 6],
                  [l, l, u, u, np.where(side, l, u)], default=interior)
    f = np.select([regime == 0, regime == 3, regime == 5, regime == 6],
                  [mag, -mag, np.where(side, mag, -mag), np.where(side, -mag, mag)], default=0.0)
    prob = MCProblem(m, l, u, lambda v: f, lambda v: SparseMatrix.zeros(m, m))
    phi = residual_phi(prob, x, f)
    cond = (l <= x) & (x <= u) & ((x != l) | (f >= 0)) & ((x != u) | (f <= 0)) & (~((l < x) & (x < u)) | (f == 0))
    regimes_seen = sorted(set(regime[cond].tolist()))
    forward = float(np.abs(phi[cond]).max())
    reverse = bool(np.all(np.abs(phi[~cond]) > 1e-10))
    elapsed = time.perf_counter() - t0
    ok = regimes_seen == [0, 1, 2, 3, 4] and forward <= 1e-10 and reverse and elapsed < 1.0
    verdict(2, ok, f"{m} samples, regimes {regimes_seen}, max|phi| at solutions {forward:.1e}, "
                   f"nonzero elsewhere {reverse}, {elapsed:.3f}s")


def test_criterion_03_merit_gradient(rng):
    t0 = time.perf_counter()
    n = 8
    A = rng.standard_normal((n, n))
    q = rng.standard_normal(n)
    prob = MCProblem(n, np.zeros(n), np.full(n, np.inf),
                     lambda x: A @ x + q + 0.25 * np.sin(x),
                     lambda x: SparseMatrix.from_dense(A + np.diag(0.25 * np.cos(x))))

    def psi(x):
        return merit(residual_phi(prob, x, prob.f(x)))

    worst, points = 0.0, 0
    while points < 20:
        x = np.abs(rng.standard_normal(n)) * (rng.random(n) < 0.7)
        f = prob.f(x)
        if np.hypot(x, f).min() <= 1e-3:
            continue
        g = merit_gradient(prob.jacobian(x), subdiff_diagonals(prob, x, f), residual_phi(prob, x, f))
        h = 1e-6
        fd = np.array([(psi(x + h * e) - psi(x - h * e)) / (2 * h) for e in np.eye(n)])
        worst = max(worst, float(np.linalg.norm(g - fd) / np.linalg.norm(g)))
        points += 1
    elapsed = time.perf_counter() - t0
    verdict(3, worst <= 1e-5 and elapsed < 1.0, f"20 points, worst relative error {worst:.2e}, {elapsed:.3f}s")


def _fd_jacobian(prob, x, h=1e-6):
    return np.column_stack([(prob.f(x + h * e) - prob.f(x - h * e)) / (2 * h) for e in np.eye(prob.n)])


def test_criterion_04_jacobian_checks(rng):
    g = GridSpec(20, 20)
    M, q = random_monotone_lcp(10, 4)
    gens = [journal_bearing(g, BearingParams(0.9, 10.0)), obstacle(g), torsion(g), combustion(g, 5.0),
            lcp(M, q)] + [p for p in small_suite() if p.name == "josephy"]
    worst = {}
    for prob in gens:
        err = 0.0
        for _ in range(10):
            x = np.clip(rng.uniform(-1, 1, prob.n), prob.lower, prob.upper)
            J = prob.jacobian(x).to_dense()
            err = max(err, float(np.abs(J - _fd_jacobian(prob, x)).max() / np.abs(J).max()))
        worst[prob.name] = err
    ok = max(worst.values()) <= 1e-6
    verdict(4, ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_criterion_05_oracle_equivalence():
    t0 = time.perf_counter()
    worst = {"assm": 0.0, "rsls": 0.0}
    failures = []
    rng = np.random.default_rng(2024)
    for k in range(50):
        n = int(rng.integers(1, 11))
        M, q = random_monotone_lcp(n, 1000 + k)
        ref = lcp_brute_force(M, q)
        prob = lcp(M, q, name=f"lcp{n}_{k}")
        for name, solver in SOLVERS.items():
            x, rep = solver(prob)
            err = float(np.abs(x - ref).max())
            worst[name] = max(worst[name], err)
            if rep.status is not Status.CONVERGED or err > 1e-6:
                failures.append((prob.name, name, rep.status.value, err))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 10.0
    verdict(5, ok, f"50 LCPs, worst |x - oracle| assm {worst['assm']:.1e} rsls {worst['rsls']:.1e}, "
                   f"failures {failures}, {elapsed:.2f}s")


@pytest.fixture(scope="module")
def bearing100():
    return journal_bearing(GridSpec(100, 100), BearingParams(0.9, 10.0))


def test_criterion_06_journal_bearing(bearing100):
    lines, ok = [], True
    for name, solver in SOLVERS.items():
        t0 = time.perf_counter()
        x, rep = solver(bearing100)
        elapsed = time.perf_counter() - t0
        err = complementarity_error(bearing100, x)
        active = float(np.mean(x == 0.0))
        ok &= (rep.status is Status.CONVERGED and rep.final_residual <= 1e-8 and rep.linear_solves <= 100
               and err <= 1e-6 and active > 0 and elapsed < 60)
        lines.append(f"{name}: {rep.status.value} residual {rep.final_residual:.1e} solves {rep.linear_solves} "
                     f"comp.err {err:.1e} active {active:.3f} {elapsed:.2f}s")
    verdict(6, ok, "; ".join(lines))


def test_criterion_07_table2_analogue(bearing100):
    columns = {"none": ("cg", "none"), "jacobi": ("cg", "jacobi"), "ilu0": ("cg", "ilu0"),
               "bjacobi": ("cg", "bjacobi"), "lu": ("lu", "none")}
    inner, sols, statuses = {}, {}, {}
    for col, (ksp, pc) in columns.items():
        x, rep = solve_semismooth(bearing100, None, SolverConfig(), LinearSolverChoice(ksp, pc))
        inner[col], sols[col], statuses[col] = rep.inner_iterations_total, x, rep.status
    diffs = [float(np.abs(sols[a] - sols[b]).max()) for a in sols for b in sols if a < b]
    ok = (inner["ilu0"] <= inner["jacobi"] <= inner["none"]
          and all(s is Status.CONVERGED for s in statuses.values()) and max(diffs) <= 1e-6)
    verdict(7, ok, f"inner iterations {inner}, all converged "
                   f"{all(s is Status.CONVERGED for s in statuses.values())}, max pairwise diff {max(diffs):.1e}")


def test_criterion_08_benchmark_breadth():
    g = GridSpec(100, 100)
    lines, ok = [], True
    for prob in (obstacle(g), torsion(g), combustion(g, 5.0)):
        xs = {}
        for name, solver in SOLVERS.items():
            x, rep = solver(prob)
            xs[name] = x
            ok &= rep.status is Status.CONVERGED
            lines.append(f"{prob.name}/{name} {rep.status.value} ({rep.outer_iterations} it)")
        diff = float(np.abs(xs["assm"] - xs["rsls"]).max())
        ok &= diff <= 1e-6
        lines.append(f"{prob.name} agreement {diff:.1e}")
    verdict(8, ok, "; ".join(lines))


def _recording(prob, seen):
    def eval_f(x):
        seen.append(np.array(x))
        return prob.eval_f(x)

    return MCProblem(prob.n, prob.lower, prob.upper, eval_f, prob.eval_jacobian, prob.name, prob.x0,
                     prob.grid, prob.solutions)


def test_criterion_09_algorithmic_contracts():
    config = SolverConfig()
    cases = small_suite() + [journal_bearing(GridSpec(30, 30)), torsion(GridSpec(30, 30)),
                             obstacle(GridSpec(30, 30)), combustion(GridSpec(30, 30), 6.0)]
    problems = []
    merit_ok = contraction_ok = feasible_ok = budget_ok = True
    for prob in cases:
        _, rep = solve_semismooth(prob, None, config)
        res = [h.residual for h in rep.history] + [rep.final_residual]
        merit_ok &= all(0.5 * b * b < 0.5 * a * a for a, b in zip(res, res[1:]))
        budget_ok &= rep.linear_solves <= config.max_linear_solves

        seen = []
        x, rep = solve_reduced_space(_recording(prob, seen), None, config)
        res = [h.residual for h in rep.history] + [rep.final_residual]
        contraction_ok &= all(b <= (1 - config.sigma * h.step) * h.residual for h, b in zip(rep.history, res[1:]))
        feasible_ok &= all(np.all(prob.lower <= s) and np.all(s <= prob.upper) for s in seen)
        budget_ok &= rep.linear_solves <= config.max_linear_solves
        problems.append(prob.name)

    # budget cap under a tight limit
    tight = SolverConfig(max_linear_solves=3)
    for solver in SOLVERS.values():
        _, rep = solver(journal_bearing(GridSpec(40, 40)), None, tight)
        budget_ok &= rep.linear_solves <= 3 and rep.status is Status.BUDGET_EXHAUSTED

    # full-system residual identity with exact inner solves
    identity_err = 0.0
    active_rows = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        M = rng.standard_normal((10, 10)) + 5 * np.eye(10)
        prob = lcp(M, rng.standard_normal(10))
        x = np.abs(rng.standard_normal(10)) * (rng.random(10) < 0.6)
        f = prob.f(x)
        phi = residual_phi(prob, x, f)
        J = prob.jacobian(x)
        st = SemismoothState(x, f, phi, merit(phi))
        st.diag = subdiff_diagonals(prob, x, f)
        st.partition = partition_by_db(st.diag, ActiveSetRule(0.3, "Fixed"))
        d, _ = semismooth_direction(st, J, LinearSolverChoice("lu"), 1e-2)
        Jd = J @ d
        r = st.diag.d_a * d + st.diag.d_b * Jd + phi
        A = st.partition.active
        active_rows += A.size
        if A.size:
            scale = np.abs(st.diag.d_b[A] * Jd[A]).max() + np.abs(phi).max()
            identity_err = max(identity_err, float(np.abs(np.abs(r[A]) - np.abs(st.diag.d_b[A] * Jd[A])).max() / scale))
    identity_ok = identity_err <= 1e-12 and active_rows > 0

    ok = merit_ok and contraction_ok and feasible_ok and budget_ok and identity_ok
    verdict(9, ok, f"{len(problems)} problems: merit decreasing {merit_ok}, contraction {contraction_ok}, "
                   f"feasible {feasible_ok}, budget {budget_ok}, residual identity err {identity_err:.1e} "
                   f"over {active_rows} active rows")


def test_criterion_10_robustness():
    import io
    import json

    summary = run_robustness()
    assm, rsls = summary.fraction("assm"), summary.fraction("rsls")
    out = io.StringIO()
    code = cli_main(["robustness"], out=out)
    text = out.getvalue()
    parsed = RobustnessSummary.from_json(text)
    round_trip = code == 0 and parsed.to_dict() == json.loads(text) and \
        RobustnessSummary.from_json(parsed.to_json()).to_dict() == parsed.to_dict()
    monotone = [i for i in summary.instances if "monotone_s" in i["problem"]]
    all_monotone = all(i["success"] and i["matches_certified"] for i in monotone)
    ok = assm >= 0.9 and rsls >= 0.8 and round_trip and all_monotone
    verdict(10, ok, f"assm {assm:.0%} rsls {rsls:.0%} of {summary.methods['assm']['total']}, "
                    f"monotone LCPs all solved {all_monotone}, CLI round-trip {round_trip}")
