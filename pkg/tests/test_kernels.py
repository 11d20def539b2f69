"""Compiled and numpy kernels must agree (bitwise where accumulation order matches)."""

import numpy as np
import pytest

from asnewton.linalg import SparseMatrix, _pykernels
from asnewton.problems import GridSpec, journal_bearing

from conftest import _ckernels, random_sparse


def _mat(rng, n, spd=True):
    return SparseMatrix.from_dense(random_sparse(rng, n, density=0.2, spd=spd))


def test_spmv_matches_dense(backend, rng):
    A = SparseMatrix.from_dense(random_sparse(rng, 7, 5))
    x = rng.standard_normal(5)
    y = backend.spmv(A.row_offsets, A.col_indices, A.values, x)
    np.testing.assert_allclose(y, A.to_dense() @ x, rtol=1e-14, atol=1e-14)
    z = rng.standard_normal(7)
    yt = backend.spmv_transpose(A.row_offsets, A.col_indices, A.values, z, 5)
    np.testing.assert_allclose(yt, A.to_dense().T @ z, rtol=1e-14, atol=1e-14)


def test_ilu0_exact_on_dense_pattern(backend, rng):
    # with a full pattern there is nothing to discard: ILU(0) is the LU factorization
    A = SparseMatrix.from_dense(random_sparse(rng, 9, density=1.0, spd=True))
    pos = A.diagonal_positions()
    lu, replaced = backend.ilu0_factor(A.row_offsets, A.col_indices, A.values, pos,
                                       np.zeros(9), 1e-12)
    assert replaced == 0
    b = rng.standard_normal(9)
    sched = backend.trisolve_schedule(A.row_offsets, A.col_indices, pos)
    x = backend.ilu0_solve(A.row_offsets, A.col_indices, lu, pos, b, sched)
    np.testing.assert_allclose(A.to_dense() @ x, b, atol=1e-10)


def test_missing_diagonal_rejected(backend):
    A = SparseMatrix.from_dense([[0.0, 1.0], [1.0, 2.0]])
    pos = A.diagonal_positions()
    with pytest.raises(ValueError):
        backend.ilu0_factor(A.row_offsets, A.col_indices, A.values, pos, np.zeros(2), 1.0)
    with pytest.raises(ValueError):
        backend.ilu0_solve(A.row_offsets, A.col_indices, A.values, pos, np.ones(2), None)


def test_zero_pivot_replaced(backend):
    A = SparseMatrix.from_coo([0, 0, 1, 1], [0, 1, 0, 1], [0.0, 1.0, 1.0, 2.0], (2, 2))
    pos = A.diagonal_positions()
    lu, replaced = backend.ilu0_factor(A.row_offsets, A.col_indices, A.values, pos,
                                       np.array([1e-14, 2e-14]), 2e-12)
    assert replaced == 1
    assert lu[pos[0]] == 2e-12


@pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
def test_backends_bitwise_equal_on_bearing_matrix(rng):
    A = journal_bearing(GridSpec(15, 12)).jacobian(np.zeros(180))
    x = rng.standard_normal(A.n_rows)
    args = (A.row_offsets, A.col_indices, A.values)
    assert np.array_equal(_ckernels.spmv(*args, x), _pykernels.spmv(*args, x))
    assert np.array_equal(_ckernels.spmv_transpose(*args, x, A.n_cols), _pykernels.spmv_transpose(*args, x, A.n_cols))
    pos = A.diagonal_positions()
    tiny = np.full(A.n_rows, 1e-300)
    lc, rc = _ckernels.ilu0_factor(*args, pos, tiny, 1.0)
    lp, rp = _pykernels.ilu0_factor(*args, pos, tiny, 1.0)
    assert rc == rp == 0
    assert np.array_equal(lc, lp)
    sc = _ckernels.ilu0_solve(A.row_offsets, A.col_indices, lc, pos, x, None)
    sched = _pykernels.trisolve_schedule(A.row_offsets, A.col_indices, pos)
    sp = _pykernels.ilu0_solve(A.row_offsets, A.col_indices, lp, pos, x, sched)
    assert np.array_equal(sc, sp)


def test_level_schedule_on_irregular_pattern(rng):
    A = _mat(rng, 30)
    pos = A.diagonal_positions()
    lu, _ = _pykernels.ilu0_factor(A.row_offsets, A.col_indices, A.values, pos, np.zeros(30), 1.0)
    b = rng.standard_normal(30)
    sched = _pykernels.trisolve_schedule(A.row_offsets, A.col_indices, pos)
    got = _pykernels.ilu0_solve(A.row_offsets, A.col_indices, lu, pos, b, sched)
    # reference: explicit triangular factors from the packed values
    LU = SparseMatrix(30, 30, A.row_offsets, A.col_indices, lu).to_dense()
    L = np.tril(LU, -1) + np.eye(30)
    U = np.triu(LU)
    np.testing.assert_allclose(got, np.linalg.solve(U, np.linalg.solve(L, b)), rtol=1e-10, atol=1e-12)


def test_backend_switch_by_environment():
    import os
    import subprocess
    import sys

    env = dict(os.environ, ASNEWTON_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import asnewton; print(asnewton.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"
