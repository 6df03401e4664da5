# cython: language_level=3
"""Compiled chain kernels: forward/backward/Viterbi inner loops.

Mirrors _chain_py.py; selected at import by toxspan.crf.kernels when the
extension built successfully.
"""

import numpy as np

cimport cython
cimport numpy as cnp
from libc.math cimport exp, log

cnp.import_array()

BACKEND = "cython"


@cython.boundscheck(False)
@cython.wraparound(False)
cdef inline double _lse(double[::1] row, Py_ssize_t L) noexcept nogil:
    cdef double m = row[0]
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(1, L):
        if row[i] > m:
            m = row[i]
    for i in range(L):
        s += exp(row[i] - m)
    return m + log(s)


@cython.boundscheck(False)
@cython.wraparound(False)
cdef double _forward(double[:, ::1] psi, double[:, ::1] trans,
                     double[::1] start, double[::1] stop,
                     double[:, ::1] alpha, double[::1] work) noexcept nogil:
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t L = psi.shape[1]
    cdef Py_ssize_t t, i, j
    for j in range(L):
        alpha[0, j] = start[j] + psi[0, j]
    for t in range(1, n):
        for j in range(L):
            for i in range(L):
                work[i] = alpha[t - 1, i] + trans[i, j]
            alpha[t, j] = _lse(work, L) + psi[t, j]
    for j in range(L):
        work[j] = alpha[n - 1, j] + stop[j]
    return _lse(work, L)


def log_partition(double[:, ::1] psi, double[:, ::1] trans,
                  double[::1] start, double[::1] stop):
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t L = psi.shape[1]
    cdef double[:, ::1] alpha = np.empty((n, L))
    cdef double[::1] work = np.empty(L)
    return _forward(psi, trans, start, stop, alpha, work)


@cython.boundscheck(False)
@cython.wraparound(False)
def forward_backward(double[:, ::1] psi, double[:, ::1] trans,
                     double[::1] start, double[::1] stop):
    """Return (logZ, unary marginals (n, L), pairwise marginals (n-1, L, L))."""
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t L = psi.shape[1]
    cdef cnp.ndarray alpha_arr = np.empty((n, L))
    cdef cnp.ndarray beta_arr = np.empty((n, L))
    cdef cnp.ndarray unary_arr = np.empty((n, L))
    cdef cnp.ndarray pair_arr = np.empty((n - 1 if n > 1 else 0, L, L))
    cdef double[:, ::1] alpha = alpha_arr
    cdef double[:, ::1] beta = beta_arr
    cdef double[:, ::1] unary = unary_arr
    cdef double[:, :, ::1] pair = pair_arr
    cdef double[::1] work = np.empty(L)
    cdef double logz
    cdef Py_ssize_t t, i, j

    with nogil:
        logz = _forward(psi, trans, start, stop, alpha, work)

        for j in range(L):
            beta[n - 1, j] = stop[j]
        for t in range(n - 2, -1, -1):
            for i in range(L):
                for j in range(L):
                    work[j] = trans[i, j] + psi[t + 1, j] + beta[t + 1, j]
                beta[t, i] = _lse(work, L)

        for t in range(n):
            for j in range(L):
                unary[t, j] = exp(alpha[t, j] + beta[t, j] - logz)
        for t in range(n - 1):
            for i in range(L):
                for j in range(L):
                    pair[t, i, j] = exp(
                        alpha[t, i] + trans[i, j] + psi[t + 1, j]
                        + beta[t + 1, j] - logz
                    )
    return logz, unary_arr, pair_arr


@cython.boundscheck(False)
@cython.wraparound(False)
def viterbi(double[:, ::1] psi, double[:, ::1] trans,
            double[::1] start, double[::1] stop):
    """Return (best path as int64 array, its score). Ties pick the lower
    label index (strict > comparison keeps the first maximum)."""
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t L = psi.shape[1]
    cdef double[:, ::1] delta = np.empty((n, L))
    cdef cnp.ndarray backptr_arr = np.empty((n, L), dtype=np.int64)
    cdef long long[:, ::1] backptr = backptr_arr
    cdef cnp.ndarray path_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] path = path_arr
    cdef Py_ssize_t t, i, j, argbest
    cdef double best, cand, score

    with nogil:
        for j in range(L):
            delta[0, j] = start[j] + psi[0, j]
        for t in range(1, n):
            for j in range(L):
                best = delta[t - 1, 0] + trans[0, j]
                argbest = 0
                for i in range(1, L):
                    cand = delta[t - 1, i] + trans[i, j]
                    if cand > best:
                        best = cand
                        argbest = i
                delta[t, j] = best + psi[t, j]
                backptr[t, j] = argbest

        best = delta[n - 1, 0] + stop[0]
        argbest = 0
        for j in range(1, L):
            cand = delta[n - 1, j] + stop[j]
            if cand > best:
                best = cand
                argbest = j
        score = best
        path[n - 1] = argbest
        for t in range(n - 1, 0, -1):
            path[t - 1] = backptr[t, path[t]]
    return path_arr, score
