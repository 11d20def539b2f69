"""Numpy fallback for the compiled kernels in ``_ckernels.pyx``.

Every function here has the same signature and semantics as its compiled
counterpart. Sparse triangular solves are vectorized by level scheduling:
rows whose dependencies are all resolved are processed together.
"""

import numpy as np


def _row_ids(indptr):
    return np.repeat(np.arange(indptr.size - 1), np.diff(indptr))


def _check_diag(diag_ptr, n):
    if len(diag_ptr) != n or (n and np.min(diag_ptr) < 0):
        raise ValueError("every row needs a stored diagonal entry")


def spmv(indptr, indices, data, x):
    n = indptr.size - 1
    if data.size == 0:
        return np.zeros(n)
    return np.bincount(_row_ids(indptr), weights=data * x[indices], minlength=n)


def spmv_transpose(indptr, indices, data, x, n_cols):
    if data.size == 0:
        return np.zeros(n_cols)
    return np.bincount(indices, weights=data * x[_row_ids(indptr)], minlength=n_cols)


def ilu0_factor(indptr, indices, data, diag_ptr, pivot_tiny, pivot_replace):
    """In-pattern LU (unit lower factor) returned as one value array.

    A pivot with magnitude at most ``pivot_tiny[i]`` is replaced by
    ``pivot_replace``; the count of replacements is returned alongside.
    """
    n = indptr.size - 1
    _check_diag(diag_ptr, n)
    if len(pivot_tiny) != n:
        raise ValueError("pivot_tiny must have one entry per row")
    ptr = indptr.tolist()
    cols = indices.tolist()
    dptr = diag_ptr.tolist()
    lu = data.tolist()
    iw = [-1] * n
    tiny = pivot_tiny.tolist()
    replaced = 0
    for i in range(n):
        lo, hi = ptr[i], ptr[i + 1]
        for p in range(lo, hi):
            iw[cols[p]] = p
        for p in range(lo, dptr[i]):
            k = cols[p]
            mult = lu[p] / lu[dptr[k]]
            lu[p] = mult
            for q in range(dptr[k] + 1, ptr[k + 1]):
                w = iw[cols[q]]
                if w >= 0:
                    lu[w] -= mult * lu[q]
        d = dptr[i]
        if abs(lu[d]) <= tiny[i]:
            lu[d] = pivot_replace
            replaced += 1
        for p in range(lo, hi):
            iw[cols[p]] = -1
    return np.array(lu, dtype=float), replaced


def _levels(ptr, cols, order, upper):
    level = [0] * (len(ptr) - 1)
    for i in order:
        best = -1
        for p in range(ptr[i], ptr[i + 1]):
            j = cols[p]
            if (j > i) if upper else (j < i):
                if level[j] > best:
                    best = level[j]
        level[i] = best + 1
    return np.array(level, dtype=np.intp)


def _plan(indptr, indices, rows_all, level, part):
    """Per-level (rows, entry positions, segment ids, columns) for one triangle."""
    entries = np.flatnonzero(part)
    entry_level = level[rows_all[entries]]
    steps = []
    row_order = np.argsort(level, kind="stable")
    row_bounds = np.searchsorted(level[row_order], np.arange(level.max() + 2))
    ent_order = entries[np.argsort(entry_level, kind="stable")]
    ent_bounds = np.searchsorted(np.sort(entry_level, kind="stable"), np.arange(level.max() + 2))
    for lev in range(level.max() + 1):
        rows = row_order[row_bounds[lev]:row_bounds[lev + 1]]
        pos = ent_order[ent_bounds[lev]:ent_bounds[lev + 1]]
        seg = np.searchsorted(rows, rows_all[pos])
        steps.append((rows, pos, seg, indices[pos]))
    return steps


def trisolve_schedule(indptr, indices, diag_ptr):
    n = indptr.size - 1
    if n == 0:
        return ([], [])
    ptr = indptr.tolist()
    cols = indices.tolist()
    rows_all = _row_ids(indptr)
    lower = _plan(indptr, indices, rows_all, _levels(ptr, cols, range(n), False), indices < rows_all)
    upper = _plan(indptr, indices, rows_all, _levels(ptr, cols, range(n - 1, -1, -1), True), indices > rows_all)
    return (lower, upper)


def ilu0_solve(indptr, indices, lu, diag_ptr, b, schedule):
    _check_diag(diag_ptr, indptr.size - 1)
    if len(b) != indptr.size - 1:
        raise ValueError("right-hand side has the wrong length")
    lower, upper = schedule
    y = np.array(b, dtype=float)
    for rows, pos, seg, cols in lower:
        if pos.size:
            y[rows] -= np.bincount(seg, weights=lu[pos] * y[cols], minlength=rows.size)
    dvals = lu[diag_ptr]
    for rows, pos, seg, cols in upper:
        if pos.size:
            y[rows] -= np.bincount(seg, weights=lu[pos] * y[cols], minlength=rows.size)
        y[rows] /= dvals[rows]
    return y
