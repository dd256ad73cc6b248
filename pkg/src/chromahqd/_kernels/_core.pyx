# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: orientation-mask counting and the integrand batch.

Contracts match `_pyref`.  Fixed-size scratch buffers bound the problem
size (64 vertices / 62 edges for orientation masks, 48 interior vertices
for the integrand); callers dispatch to the reference implementation
beyond those limits.
"""

import numpy as np

cimport cython
from libc.math cimport NAN, sqrt

MAX_MASK_VERTICES = 64
MAX_MASK_EDGES = 62
MAX_INTERIOR = 48
MAX_TOTAL = 160
MAX_EDGES = 96


def count_compatible_masks(
    int n,
    const int[::1] tails,
    const int[::1] heads,
    const unsigned char[::1] interior,
    const unsigned long long[::1] higher,
    unsigned long long lo,
    unsigned long long hi,
):
    cdef int m = tails.shape[0]
    if n > 64 or m > 62:
        raise ValueError("graph too large for the mask kernel")
    cdef int indeg[64]
    cdef int outdeg[64]
    cdef int pending[64]
    cdef int order[64]
    cdef int queue[64]
    cdef int csr_ptr[65]
    cdef int csr_fill[64]
    cdef int csr[62]
    cdef int tail_of[62]
    cdef int head_of[62]
    cdef unsigned long long reach[64]
    cdef unsigned long long mask, r
    cdef long long total = 0
    cdef int j, v, w, t, h, qlen, popped, p, ok, idx

    with nogil:
        for mask in range(lo, hi):
            for v in range(n):
                indeg[v] = 0
                outdeg[v] = 0
            for j in range(m):
                if (mask >> j) & 1:
                    t = tails[j]
                    h = heads[j]
                else:
                    t = heads[j]
                    h = tails[j]
                tail_of[j] = t
                head_of[j] = h
                outdeg[t] += 1
                indeg[h] += 1
            ok = 1
            for v in range(n):
                if interior[v] and (indeg[v] == 0 or outdeg[v] == 0):
                    ok = 0
                    break
            if not ok:
                continue
            # out-adjacency in CSR form
            csr_ptr[0] = 0
            for v in range(n):
                csr_ptr[v + 1] = csr_ptr[v] + outdeg[v]
                csr_fill[v] = csr_ptr[v]
            for j in range(m):
                csr[csr_fill[tail_of[j]]] = head_of[j]
                csr_fill[tail_of[j]] += 1
            # Kahn: acyclic iff all vertices get ordered
            qlen = 0
            for v in range(n):
                pending[v] = indeg[v]
                if pending[v] == 0:
                    queue[qlen] = v
                    qlen += 1
            popped = 0
            while qlen > 0:
                qlen -= 1
                v = queue[qlen]
                order[popped] = v
                popped += 1
                for p in range(csr_ptr[v], csr_ptr[v + 1]):
                    w = csr[p]
                    pending[w] -= 1
                    if pending[w] == 0:
                        queue[qlen] = w
                        qlen += 1
            if popped < n:
                continue
            # reachability bitsets in reverse topological order
            for idx in range(n - 1, -1, -1):
                v = order[idx]
                r = (<unsigned long long> 1) << v
                for p in range(csr_ptr[v], csr_ptr[v + 1]):
                    r |= reach[csr[p]]
                reach[v] = r
            ok = 1
            for v in range(n):
                if higher[v] and (reach[v] & higher[v]):
                    ok = 0
                    break
            if ok:
                total += 1
    return int(total)


def integrand_batch(
    int n_int,
    const int[::1] tails,
    const int[::1] heads,
    const double[::1] bvals,
    const double[:, ::1] conduct,
):
    cdef int rows = conduct.shape[0]
    cdef int m = conduct.shape[1]
    cdef int n_total = bvals.shape[0]
    if n_int > 48 or n_total > 160 or m > 96:
        raise ValueError("problem too large for the integrand kernel")
    out_arr = np.empty(rows, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double A[48 * 48]
    cdef double rhs[48]
    cdef double hval[160]
    cdef double s, c, d, z, prod, piv
    cdef int i, j, t, h, row, col, k, bad

    with nogil:
        for row in range(rows):
            for i in range(n_int * n_int):
                A[i] = 0.0
            for i in range(n_int):
                rhs[i] = 0.0
            for j in range(m):
                c = conduct[row, j]
                t = tails[j]
                h = heads[j]
                if t < n_int and h < n_int:
                    A[t * n_int + t] += c
                    A[h * n_int + h] += c
                    A[t * n_int + h] -= c
                    A[h * n_int + t] -= c
                elif t < n_int:
                    A[t * n_int + t] += c
                    rhs[t] += c * bvals[h]
                elif h < n_int:
                    A[h * n_int + h] += c
                    rhs[h] += c * bvals[t]
            # Cholesky A = L L^T, stored in the lower triangle of A
            bad = 0
            for j in range(n_int):
                s = A[j * n_int + j]
                for k in range(j):
                    s -= A[j * n_int + k] * A[j * n_int + k]
                if s <= 0.0:
                    bad = 1
                    break
                piv = sqrt(s)
                A[j * n_int + j] = piv
                for i in range(j + 1, n_int):
                    s = A[i * n_int + j]
                    for k in range(j):
                        s -= A[i * n_int + k] * A[j * n_int + k]
                    A[i * n_int + j] = s / piv
            if bad:
                out[row] = NAN
                continue
            # forward then backward substitution, solution into rhs
            for i in range(n_int):
                s = rhs[i]
                for k in range(i):
                    s -= A[i * n_int + k] * rhs[k]
                rhs[i] = s / A[i * n_int + i]
            for i in range(n_int - 1, -1, -1):
                s = rhs[i]
                for k in range(i + 1, n_int):
                    s -= A[k * n_int + i] * rhs[k]
                rhs[i] = s / A[i * n_int + i]
            for i in range(n_int):
                hval[i] = rhs[i]
            for i in range(n_int, n_total):
                hval[i] = bvals[i]
            z = 0.0
            for j in range(m):
                d = hval[tails[j]] - hval[heads[j]]
                z += conduct[row, j] * d * d
            if z <= 0.0:
                out[row] = NAN
                continue
            prod = 1.0
            for j in range(m):
                d = hval[tails[j]] - hval[heads[j]]
                prod *= d * d / z
            out[row] = prod
    return out_arr
