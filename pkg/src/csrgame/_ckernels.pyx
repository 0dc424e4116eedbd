# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: nearest-other-holder tables and exhaustive profile scans."""
import numpy as np

from libc.stdint cimport int64_t
from libc.stdlib cimport malloc, free


cdef void _exclusive(const int64_t[:, ::1] dist, Py_ssize_t n, Py_ssize_t k,
                     int64_t big, const int64_t* P, int64_t* out) noexcept nogil:
    cdef Py_ssize_t i, j, o
    cdef int64_t d
    for i in range(n):
        for o in range(k):
            out[i * k + o] = big
        for j in range(n):
            if j != i:
                d = dist[i, j]
                o = P[j]
                if d < out[i * k + o]:
                    out[i * k + o] = d


cdef int64_t _cost(Py_ssize_t n, Py_ssize_t k, const int64_t* P,
                   const int64_t* ex, bint check_nash, bint* is_nash) noexcept nogil:
    cdef Py_ssize_t i, o
    cdef int64_t total = 0, row, best, held
    is_nash[0] = True
    for i in range(n):
        row = 0
        best = 0
        for o in range(k):
            row += ex[i * k + o]
            if ex[i * k + o] > best:
                best = ex[i * k + o]
        held = ex[i * k + P[i]]
        total += row - held
        if check_nash and held != best:
            is_nash[0] = False
    return total


def exclusive_nearest(dist, int64_t D, Py_ssize_t k, P):
    cdef const int64_t[:, ::1] dv = np.ascontiguousarray(dist, dtype=np.int64)
    cdef Py_ssize_t n = dv.shape[0]
    cdef const int64_t[::1] pv = np.ascontiguousarray(P, dtype=np.int64)
    out = np.empty((n, k), dtype=np.int64)
    cdef int64_t[:, ::1] ov = out
    with nogil:
        _exclusive(dv, n, k, D + 1, &pv[0], &ov[0, 0])
    return out


def batch_social_cost(dist, int64_t D, Py_ssize_t k, profiles):
    cdef const int64_t[:, ::1] dv = np.ascontiguousarray(dist, dtype=np.int64)
    cdef const int64_t[:, ::1] pv = np.ascontiguousarray(profiles, dtype=np.int64)
    cdef Py_ssize_t n = dv.shape[0], m = pv.shape[0], t
    out = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef int64_t* ex = <int64_t*> malloc(n * k * sizeof(int64_t))
    cdef bint dummy
    if ex == NULL:
        raise MemoryError()
    try:
        with nogil:
            for t in range(m):
                _exclusive(dv, n, k, D + 1, &pv[t, 0], ex)
                ov[t] = _cost(n, k, &pv[t, 0], ex, False, &dummy)
    finally:
        free(ex)
    return out


def scan_profiles(dist, int64_t D, Py_ssize_t k, int64_t start, int64_t stop, bint check_nash):
    cdef const int64_t[:, ::1] dv = np.ascontiguousarray(dist, dtype=np.int64)
    cdef Py_ssize_t n = dv.shape[0], i
    cdef int64_t m = stop - start, t, rem
    costs = np.empty(m, dtype=np.int64)
    nash = np.zeros(m, dtype=np.uint8)
    cdef int64_t[::1] cv = costs
    cdef unsigned char[::1] nv = nash
    cdef int64_t* P = <int64_t*> malloc(n * sizeof(int64_t))
    cdef int64_t* ex = <int64_t*> malloc(n * k * sizeof(int64_t))
    cdef bint ne
    if P == NULL or ex == NULL:
        free(P)
        free(ex)
        raise MemoryError()
    try:
        with nogil:
            rem = start
            for i in range(n - 1, -1, -1):
                P[i] = rem % k
                rem = rem // k
            for t in range(m):
                _exclusive(dv, n, k, D + 1, P, ex)
                cv[t] = _cost(n, k, P, ex, check_nash, &ne)
                nv[t] = ne if check_nash else 0
                i = n - 1
                while i >= 0:
                    P[i] += 1
                    if P[i] < k:
                        break
                    P[i] = 0
                    i -= 1
    finally:
        free(P)
        free(ex)
    return costs, nash
