# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled integer elimination kernels (int64 with overflow guard).

Mirrors the pure backend for the two hot operations.  Entries are
guarded against int64 overflow: whenever an intermediate value could
exceed 2^61 the kernel raises OverflowError and the caller falls back
to the arbitrary-precision implementation.
"""

import numpy as np

cimport numpy as cnp

cdef long long GUARD = (<long long>1) << 61

BACKEND = "compiled"


cdef inline long long _llabs(long long v):
    return -v if v < 0 else v


def snf_diagonal(object rows):
    cdef cnp.ndarray[cnp.int64_t, ndim=2] A = np.array(rows, dtype=np.int64)
    cdef Py_ssize_t m = A.shape[0]
    cdef Py_ssize_t n = A.shape[1]
    if m == 0 or n == 0:
        return []
    cdef long long[:, :] a = A
    cdef Py_ssize_t t = 0, i, j, pi, pj, bad
    cdef long long best, v, q, d, r
    cdef bint restart
    while t < m and t < n:
        pi = -1
        pj = -1
        best = 0
        for i in range(t, m):
            for j in range(t, n):
                v = a[i, j]
                if v != 0 and (pi < 0 or _llabs(v) < best):
                    best = _llabs(v)
                    pi = i
                    pj = j
        if pi < 0:
            break
        if pi != t:
            for j in range(t, n):
                v = a[t, j]; a[t, j] = a[pi, j]; a[pi, j] = v
        if pj != t:
            for i in range(0, m):
                v = a[i, t]; a[i, t] = a[i, pj]; a[i, pj] = v
        while True:
            restart = False
            for i in range(t + 1, m):
                if a[i, t] == 0:
                    continue
                d = a[t, t]
                q = a[i, t] / d
                r = a[i, t] - q * d
                if 2 * r > _llabs(d):
                    q += 1 if d > 0 else -1
                elif 2 * r <= -_llabs(d):
                    q -= 1 if d > 0 else -1
                if q != 0:
                    for j in range(t, n):
                        v = a[i, j] - q * a[t, j]
                        if _llabs(v) > GUARD:
                            raise OverflowError("int64 SNF overflow")
                        a[i, j] = v
                if a[i, t] != 0:
                    for j in range(t, n):
                        v = a[t, j]; a[t, j] = a[i, j]; a[i, j] = v
                    restart = True
                    break
            if restart:
                continue
            for j in range(t + 1, n):
                if a[t, j] == 0:
                    continue
                d = a[t, t]
                q = a[t, j] / d
                r = a[t, j] - q * d
                if 2 * r > _llabs(d):
                    q += 1 if d > 0 else -1
                elif 2 * r <= -_llabs(d):
                    q -= 1 if d > 0 else -1
                if q != 0:
                    for i in range(0, m):
                        v = a[i, j] - q * a[i, t]
                        if _llabs(v) > GUARD:
                            raise OverflowError("int64 SNF overflow")
                        a[i, j] = v
                if a[t, j] != 0:
                    for i in range(0, m):
                        v = a[i, t]; a[i, t] = a[i, j]; a[i, j] = v
                    restart = True
                    break
            if restart:
                continue
            d = a[t, t]
            bad = -1
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i, j] % d != 0:
                        bad = i
                        break
                if bad >= 0:
                    break
            if bad < 0:
                break
            for j in range(t, n):
                v = a[t, j] + a[bad, j]
                if _llabs(v) > GUARD:
                    raise OverflowError("int64 SNF overflow")
                a[t, j] = v
        if a[t, t] < 0:
            for i in range(0, m):
                a[i, t] = -a[i, t]
        t += 1
    return [int(a[i, i]) for i in range(t)]


def rank_mod_p(object rows, long long p):
    cdef cnp.ndarray[cnp.int64_t, ndim=2] A = np.array(rows, dtype=np.int64)
    cdef Py_ssize_t m = A.shape[0]
    cdef Py_ssize_t n = A.shape[1]
    if m == 0 or n == 0:
        return 0
    cdef long long[:, :] a = A
    cdef Py_ssize_t i, j, rank = 0, col = 0, piv
    cdef long long inv, f, x
    for i in range(m):
        for j in range(n):
            x = a[i, j] % p
            if x < 0:
                x += p
            a[i, j] = x
    while rank < m and col < n:
        piv = -1
        for i in range(rank, m):
            if a[i, col] != 0:
                piv = i
                break
        if piv < 0:
            col += 1
            continue
        if piv != rank:
            for j in range(col, n):
                x = a[rank, j]; a[rank, j] = a[piv, j]; a[piv, j] = x
        inv = 1
        f = a[rank, col] % p
        x = p - 2
        while x > 0:
            if x & 1:
                inv = (inv * f) % p
            f = (f * f) % p
            x >>= 1
        for j in range(col, n):
            a[rank, j] = (a[rank, j] * inv) % p
        for i in range(m):
            if i != rank and a[i, col] != 0:
                f = a[i, col]
                for j in range(col, n):
                    a[i, j] = (a[i, j] - f * a[rank, j]) % p
                    if a[i, j] < 0:
                        a[i, j] += p
        rank += 1
        col += 1
    return rank
