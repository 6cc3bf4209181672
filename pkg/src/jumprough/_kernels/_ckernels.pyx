# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Mirrors the API of ``_pykernels`` exactly: flat truncated tensors of length
``1 + d + d^2 + ... + d^N`` with level k at ``offsets[k] : offsets[k+1]``.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport pow, sqrt

cnp.import_array()

BACKEND = "c"


def level_offsets(dim, level):
    offs = np.empty(level + 2, dtype=np.int64)
    offs[0] = 0
    size = 1
    for k in range(level + 1):
        offs[k + 1] = offs[k] + size
        size *= dim
    return offs


def tensor_size(dim, level):
    return int(level_offsets(dim, level)[-1])


cdef void _mul(double* a, double* b, double* out, long* offs, int dim,
               int level) noexcept nogil:
    cdef int k, i, j
    cdef long ia, ib, na, nb, base
    for k in range(level + 1):
        base = offs[k]
        for ia in range(offs[k + 1] - base):
            out[base + ia] = 0.0
        for i in range(k + 1):
            j = k - i
            na = offs[i + 1] - offs[i]
            nb = offs[j + 1] - offs[j]
            for ia in range(na):
                for ib in range(nb):
                    out[base + ia * nb + ib] += a[offs[i] + ia] * b[offs[j] + ib]


cdef void _exp(double* a, double* work, double* out, long* offs, int dim,
               int level) noexcept nogil:
    # out = 1 + a/1 (1 + a/2 (1 + ...)); a scalar slot assumed 0 by caller.
    cdef long m = offs[level + 1]
    cdef long i
    cdef int k
    for i in range(m):
        out[i] = 0.0
    out[0] = 1.0
    for k in range(level, 0, -1):
        _mul(a, out, work, offs, dim, level)
        for i in range(m):
            out[i] = work[i] / k
        out[0] += 1.0


cdef void _log(double* x, double* work, double* out, long* offs, int dim,
               int level) noexcept nogil:
    # out = log(1 + x); x scalar slot assumed 0 by caller.
    cdef long m = offs[level + 1]
    cdef long i
    cdef int k
    for i in range(m):
        out[i] = 0.0
    out[0] = 1.0 / level
    for k in range(level - 1, 0, -1):
        _mul(x, out, work, offs, dim, level)
        for i in range(m):
            out[i] = -work[i]
        out[0] += 1.0 / k
    _mul(x, out, work, offs, dim, level)
    for i in range(m):
        out[i] = work[i]


def tensor_mul(a, b, dim, level):
    cdef cnp.ndarray[double, ndim=1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef cnp.ndarray[long, ndim=1] offs = level_offsets(dim, level)
    cdef cnp.ndarray[double, ndim=1] out = np.empty(offs[level + 1])
    _mul(&av[0], &bv[0], &out[0], &offs[0], dim, level)
    return out


def tensor_exp(a, dim, level):
    cdef cnp.ndarray[double, ndim=1] av = np.array(a, dtype=np.float64)
    av[0] = 0.0
    cdef cnp.ndarray[long, ndim=1] offs = level_offsets(dim, level)
    cdef cnp.ndarray[double, ndim=1] work = np.empty(offs[level + 1])
    cdef cnp.ndarray[double, ndim=1] out = np.empty(offs[level + 1])
    _exp(&av[0], &work[0], &out[0], &offs[0], dim, level)
    return out


def tensor_log(g, dim, level):
    cdef cnp.ndarray[double, ndim=1] gv = np.array(g, dtype=np.float64)
    gv[0] = 0.0
    cdef cnp.ndarray[long, ndim=1] offs = level_offsets(dim, level)
    cdef cnp.ndarray[double, ndim=1] work = np.empty(offs[level + 1])
    cdef cnp.ndarray[double, ndim=1] out = np.empty(offs[level + 1])
    _log(&gv[0], &work[0], &out[0], &offs[0], dim, level)
    return out


def sig_product(logs, dim, level):
    cdef cnp.ndarray[double, ndim=2] lv = np.ascontiguousarray(logs, dtype=np.float64)
    cdef cnp.ndarray[long, ndim=1] offs = level_offsets(dim, level)
    cdef long m = offs[level + 1]
    cdef cnp.ndarray[double, ndim=1] acc = np.zeros(m)
    cdef cnp.ndarray[double, ndim=1] e = np.empty(m)
    cdef cnp.ndarray[double, ndim=1] work = np.empty(m)
    cdef cnp.ndarray[double, ndim=1] row = np.empty(m)
    cdef long n = lv.shape[0]
    cdef long i, j
    cdef int lev = level, d = dim
    acc[0] = 1.0
    with nogil:
        for i in range(n):
            for j in range(m):
                row[j] = lv[i, j]
            row[0] = 0.0
            _exp(&row[0], &work[0], &e[0], &offs[0], d, lev)
            _mul(&acc[0], &e[0], &work[0], &offs[0], d, lev)
            for j in range(m):
                acc[j] = work[j]
    return acc


def pvar_dp(values, p):
    cdef cnp.ndarray[double, ndim=2] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef long n = v.shape[0], d = v.shape[1]
    if n < 2:
        return 0.0
    cdef cnp.ndarray[double, ndim=1] best = np.zeros(n)
    cdef double pp = p, s, cand, bj, diff
    cdef long i, j, k
    with nogil:
        for j in range(1, n):
            bj = -1.0
            for i in range(j):
                s = 0.0
                for k in range(d):
                    diff = v[i, k] - v[j, k]
                    s += diff * diff
                cand = best[i] + pow(s, pp / 2.0)
                if cand > bj:
                    bj = cand
            best[j] = bj
    return float(best[n - 1])
