# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fraction-free rank kernel on int64 rows with 128-bit intermediates.

Returns -1 when any intermediate leaves the int64 range; the caller then
recomputes the rank with Python integers.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cdef extern from *:
    ctypedef long long int128 "__int128"

cdef int64_t LIMIT = 4611686018427387904  # 2**62


cdef inline int64_t _gcd(int64_t a, int64_t b) nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


def rank_int64(cnp.int64_t[:, ::1] mat):
    """Rank of a dense integer matrix (modified in place)."""
    cdef Py_ssize_t m = mat.shape[0]
    cdef Py_ssize_t n = mat.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, best
    cdef int64_t p, a, g, pg, ag, bestval, v
    cdef int128 t
    cdef bint overflow = False
    with nogil:
        for c in range(n):
            if r == m:
                break
            best = -1
            bestval = 0
            for i in range(r, m):
                v = mat[i, c]
                if v != 0:
                    if v < 0:
                        v = -v
                    if best < 0 or v < bestval:
                        best = i
                        bestval = v
                        if v == 1:
                            break
            if best < 0:
                continue
            if best != r:
                for j in range(c, n):
                    v = mat[r, j]
                    mat[r, j] = mat[best, j]
                    mat[best, j] = v
            p = mat[r, c]
            for i in range(r + 1, m):
                a = mat[i, c]
                if a == 0:
                    continue
                g = _gcd(p, a)
                pg = p // g
                ag = a // g
                # row_i <- pg * row_i - ag * row_r, then divide out the row gcd
                g = 0
                for j in range(c, n):
                    t = <int128>pg * mat[i, j] - <int128>ag * mat[r, j]
                    if t >= LIMIT or t <= -LIMIT:
                        overflow = True
                        break
                    mat[i, j] = <int64_t>t
                    if t != 0:
                        g = _gcd(g, <int64_t>t)
                if overflow:
                    break
                if g > 1:
                    for j in range(c, n):
                        mat[i, j] = mat[i, j] // g
            if overflow:
                break
            r += 1
    if overflow:
        return -1
    return r
