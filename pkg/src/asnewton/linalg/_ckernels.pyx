# Compiled CSR kernels. Same signatures and semantics as _pykernels; the
# accumulation order matches so both backends agree bitwise on IEEE doubles.

import numpy as np

from libc.math cimport fabs


cdef int _check_diag(const Py_ssize_t[::1] diag_ptr, Py_ssize_t n) except -1:
    cdef Py_ssize_t i
    if diag_ptr.shape[0] != n:
        raise ValueError("every row needs a stored diagonal entry")
    for i in range(n):
        if diag_ptr[i] < 0:
            raise ValueError("every row needs a stored diagonal entry")
    return 0


def spmv(const Py_ssize_t[::1] indptr, const Py_ssize_t[::1] indices,
         const double[::1] data, const double[::1] x):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.zeros(n)
    cdef double[::1] y = out
    cdef Py_ssize_t i, p
    cdef double acc
    with nogil:
        for i in range(n):
            acc = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                acc = acc + data[p] * x[indices[p]]
            y[i] = acc
    return out


def spmv_transpose(const Py_ssize_t[::1] indptr, const Py_ssize_t[::1] indices,
                   const double[::1] data, const double[::1] x, Py_ssize_t n_cols):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.zeros(n_cols)
    cdef double[::1] y = out
    cdef Py_ssize_t i, p
    with nogil:
        for i in range(n):
            for p in range(indptr[i], indptr[i + 1]):
                y[indices[p]] = y[indices[p]] + data[p] * x[i]
    return out


def ilu0_factor(const Py_ssize_t[::1] indptr, const Py_ssize_t[::1] indices,
                const double[::1] data, const Py_ssize_t[::1] diag_ptr,
                const double[::1] pivot_tiny, double pivot_replace):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    _check_diag(diag_ptr, n)
    if pivot_tiny.shape[0] != n:
        raise ValueError("pivot_tiny must have one entry per row")
    out = np.array(data, dtype=float)
    cdef double[::1] lu = out
    iw_arr = np.full(n, -1, dtype=np.intp)
    cdef Py_ssize_t[::1] iw = iw_arr
    cdef Py_ssize_t i, p, q, k, w, d
    cdef Py_ssize_t replaced = 0
    cdef double mult
    with nogil:
        for i in range(n):
            for p in range(indptr[i], indptr[i + 1]):
                iw[indices[p]] = p
            for p in range(indptr[i], diag_ptr[i]):
                k = indices[p]
                mult = lu[p] / lu[diag_ptr[k]]
                lu[p] = mult
                for q in range(diag_ptr[k] + 1, indptr[k + 1]):
                    w = iw[indices[q]]
                    if w >= 0:
                        lu[w] = lu[w] - mult * lu[q]
            d = diag_ptr[i]
            if fabs(lu[d]) <= pivot_tiny[i]:
                lu[d] = pivot_replace
                replaced += 1
            for p in range(indptr[i], indptr[i + 1]):
                iw[indices[p]] = -1
    return out, replaced


def trisolve_schedule(indptr, indices, diag_ptr):
    return None


def ilu0_solve(const Py_ssize_t[::1] indptr, const Py_ssize_t[::1] indices,
               const double[::1] lu, const Py_ssize_t[::1] diag_ptr,
               const double[::1] b, schedule):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    _check_diag(diag_ptr, n)
    if b.shape[0] != n:
        raise ValueError("right-hand side has the wrong length")
    out = np.array(b, dtype=float)
    cdef double[::1] y = out
    cdef Py_ssize_t i, p
    cdef double acc
    with nogil:
        for i in range(n):
            acc = 0.0
            for p in range(indptr[i], diag_ptr[i]):
                acc = acc + lu[p] * y[indices[p]]
            y[i] = y[i] - acc
        for i in range(n - 1, -1, -1):
            acc = 0.0
            for p in range(diag_ptr[i] + 1, indptr[i + 1]):
                acc = acc + lu[p] * y[indices[p]]
            y[i] = (y[i] - acc) / lu[diag_ptr[i]]
    return out
