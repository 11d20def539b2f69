"""Command-line benchmark harness.

    asnewton [run] --problem jbearing --nx 100 --ny 100 --ecc 0.9 --b 10 --method assm --ksp cg --pc ilu0
    asnewton table2 --problem obstacle --nx 100 --ny 100 --columns lu,cg+ilu0,cg+bjacobi
    asnewton robustness --format csv

Reports go to stdout, diagnostics to stderr. Exit codes for ``run``:
0 converged, 2 linear-solve budget exhausted, 3 line-search failure or
stationary point, 4 invalid input, 5 numerical breakdown.
"""

from __future__ import annotations

import argparse
import json
import sys

from asnewton.linalg import LinearSolverChoice, write_matrix_market
from asnewton.model import InvalidInputError, SolverConfig, Status
from asnewton.report import (
    EXIT_CODES,
    METHODS,
    PROBLEMS,
    ROBUSTNESS_CSV_COLUMNS,
    SUMMARY_COLUMNS,
    TABLE2_COLUMNS,
    TABLE2_CSV_COLUMNS,
    RunSpec,
    _summary_row,
    rows_to_csv,
    run_robustness,
    run_single,
    run_table2,
    write_solution_csv,
)

COMMANDS = ("run", "table2", "robustness")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    d = RunSpec()
    p.add_argument("--problem", choices=PROBLEMS, default=d.problem)
    p.add_argument("--nx", type=int, default=d.nx)
    p.add_argument("--ny", type=int, default=d.ny)
    p.add_argument("--ecc", type=float, default=d.ecc, help="journal bearing eccentricity in (0, 1)")
    p.add_argument("--b", type=float, default=d.b, help="journal bearing half height")
    p.add_argument("--c", type=float, default=d.c, help="torsion load constant")
    p.add_argument("--lambda", dest="lam", type=float, default=d.lam, help="combustion parameter")
    p.add_argument("--n", type=int, default=d.n, help="random LCP size")
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--method", choices=tuple(METHODS), default=d.method)
    p.add_argument("--ksp", choices=("cg", "lu"), default=d.ksp)
    p.add_argument("--pc", choices=("none", "jacobi", "ilu0", "bjacobi"), default=d.pc)
    p.add_argument("--blocks", type=int, default=d.blocks)
    p.add_argument("--tol", type=float, default=d.tol)
    p.add_argument("--max-solves", dest="max_solves", type=int, default=d.max_solves)
    p.add_argument("--inner-rtol", dest="inner_rtol", type=float, default=d.inner_rtol)
    p.add_argument("--format", choices=("json", "csv"), default=d.format)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="asnewton", description=__doc__.splitlines()[0],
                                     allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="solve one instance", allow_abbrev=False)
    _add_run_flags(run)
    run.add_argument("--dump-solution", dest="dump_solution", metavar="PATH")
    run.add_argument("--dump-matrix", dest="dump_matrix", metavar="PATH",
                     help="MatrixMarket export of the Jacobian at the final iterate")

    t2 = sub.add_parser("table2", help="compare linear solvers on one problem", allow_abbrev=False)
    _add_run_flags(t2)
    t2.add_argument("--columns", default=",".join(TABLE2_COLUMNS),
                    help="comma-separated ksp[+pc] configurations")

    rob = sub.add_parser("robustness", help="both methods on the bundled small suite", allow_abbrev=False)
    rob.add_argument("--ksp", choices=("cg", "lu"), default="cg")
    rob.add_argument("--pc", choices=("none", "jacobi", "ilu0", "bjacobi"), default="ilu0")
    rob.add_argument("--blocks", type=int, default=4)
    rob.add_argument("--tol", type=float, default=SolverConfig.tol)
    rob.add_argument("--max-solves", dest="max_solves", type=int, default=SolverConfig.max_linear_solves)
    rob.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def _spec_from(args) -> RunSpec:
    keys = RunSpec.__dataclass_fields__
    return RunSpec(**{k: v for k, v in vars(args).items() if k in keys})


def _cmd_run(args, out) -> int:
    spec = _spec_from(args)
    doc, x, problem = run_single(spec)
    if doc.report.status.value != "Converged":
        print(f"asnewton: {problem.name}: {doc.report.status.value}", file=sys.stderr)
    if spec.format == "json":
        out.write(doc.to_json() + "\n")
    else:
        out.write(rows_to_csv([_summary_row(doc)], SUMMARY_COLUMNS))
    if spec.dump_solution:
        write_solution_csv(problem, x, spec.dump_solution)
    if spec.dump_matrix:
        write_matrix_market(problem.jacobian(x), spec.dump_matrix)
    return doc.exit_code


def _cmd_table2(args, out) -> int:
    spec = _spec_from(args)
    columns = tuple(c.strip() for c in args.columns.split(",") if c.strip())
    table = run_table2(spec, columns)
    if spec.format == "json":
        out.write(json.dumps(table, indent=2) + "\n")
    else:
        out.write(rows_to_csv(table["rows"], TABLE2_CSV_COLUMNS))
    codes = [EXIT_CODES[Status(r["status"])] for r in table["rows"]]
    return max(codes, default=0)


def _cmd_robustness(args, out) -> int:
    linear = LinearSolverChoice(args.ksp, args.pc, args.blocks)
    config = SolverConfig(tol=args.tol, max_linear_solves=args.max_solves)
    summary = run_robustness(linear, config)
    if args.format == "json":
        out.write(summary.to_json() + "\n")
    else:
        out.write(rows_to_csv(summary.instances, ROBUSTNESS_CSV_COLUMNS))
    for method, m in summary.methods.items():
        print(f"asnewton: {method}: {m['solved']}/{m['total']} solved", file=sys.stderr)
    return 0


def main(argv=None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    if argv and argv[0] not in COMMANDS and argv[0] not in ("-h", "--help"):
        argv.insert(0, "run")
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 4 if exc.code else 0
    handlers = {"run": _cmd_run, "table2": _cmd_table2, "robustness": _cmd_robustness}
    try:
        return handlers[args.command](args, out)
    except (InvalidInputError, ValueError) as exc:
        print(f"asnewton: invalid input: {exc}", file=sys.stderr)
        return 4
    except ArithmeticError as exc:
        print(f"asnewton: numerical breakdown: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
