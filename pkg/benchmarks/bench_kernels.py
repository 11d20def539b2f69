"""Compiled vs numpy kernels: per-kernel timings and a full solve per backend.

    python3 benchmarks/bench_kernels.py [--nx 100] [--repeat 5]

Kernel timings call both modules directly. The end-to-end rows run the CLI
in a subprocess, with ASNEWTON_PURE_PYTHON set for the fallback, because the
backend is fixed at import.
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from asnewton.linalg import _pykernels
from asnewton.problems import GridSpec, journal_bearing

try:
    from asnewton.linalg import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def kernel_rows(nx, repeat):
    A = journal_bearing(GridSpec(nx, nx)).jacobian(None)
    args = (A.row_offsets, A.col_indices, A.values)
    pos = A.diagonal_positions()
    tiny = np.zeros(A.n_rows)
    x = np.random.default_rng(0).standard_normal(A.n_rows)
    rows = []
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    for name, k in backends:
        lu, _ = k.ilu0_factor(*args, pos, tiny, 1.0)
        sched = k.trisolve_schedule(A.row_offsets, A.col_indices, pos)
        rows.append({
            "backend": name,
            "spmv": best_of(lambda: k.spmv(*args, x), repeat, 20),
            "spmv_transpose": best_of(lambda: k.spmv_transpose(*args, x, A.n_cols), repeat, 20),
            "ilu0_factor": best_of(lambda: k.ilu0_factor(*args, pos, tiny, 1.0), repeat, 1),
            "trisolve_schedule": best_of(lambda: k.trisolve_schedule(A.row_offsets, A.col_indices, pos), repeat, 1),
            "ilu0_solve": best_of(lambda: k.ilu0_solve(A.row_offsets, A.col_indices, lu, pos, x, sched), repeat, 5),
        })
    return A.n_rows, rows


def solve_row(backend, nx, method):
    env = dict(os.environ)
    env.pop("ASNEWTON_PURE_PYTHON", None)
    if backend == "python":
        env["ASNEWTON_PURE_PYTHON"] = "1"
    cmd = [sys.executable, "-m", "asnewton", "--problem", "jbearing", "--nx", str(nx), "--ny", str(nx),
           "--method", method]
    doc = json.loads(subprocess.run(cmd, capture_output=True, text=True, env=env, check=True).stdout)
    rep = doc["report"]
    return {"backend": doc["backend"], "method": method, "status": rep["status"],
            "outer": rep["outer_iterations"], "inner": rep["inner_iterations_total"],
            "seconds": rep["wall_time_seconds"]}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nx", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    n, rows = kernel_rows(args.nx, args.repeat)
    keys = [k for k in rows[0] if k != "backend"]
    print(f"kernels on the {args.nx}x{args.nx} journal bearing matrix (n = {n}), best time in ms")
    print(f"{'kernel':<20}" + "".join(f"{r['backend']:>12}" for r in rows) + ("     speedup" if len(rows) == 2 else ""))
    for k in keys:
        line = f"{k:<20}" + "".join(f"{1e3 * r[k]:>12.3f}" for r in rows)
        if len(rows) == 2:
            # the compiled triangular solve is sequential and needs no schedule
            line += "        n/a" if k == "trisolve_schedule" else f"{rows[0][k] / rows[1][k]:>11.1f}x"
        print(line)

    print(f"\nfull solves, jbearing {args.nx}x{args.nx}, cg + ilu0")
    print(f"{'backend':<10}{'method':<8}{'status':<12}{'outer':>6}{'inner':>7}{'seconds':>10}")
    for backend in [r["backend"] for r in rows]:
        for method in ("assm", "rsls"):
            r = solve_row(backend, args.nx, method)
            print(f"{r['backend']:<10}{r['method']:<8}{r['status']:<12}{r['outer']:>6}{r['inner']:>7}{r['seconds']:>10.3f}")


if __name__ == "__main__":
    main()
