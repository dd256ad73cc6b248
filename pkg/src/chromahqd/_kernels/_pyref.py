"""Reference implementations of the hot-loop kernels.

Same contracts as the compiled module `_core`: exact integer counts for
orientation enumeration, float64 arrays for the integrand batch.  The
orientation loop is plain Python (bitmask at a time); the integrand batch
is vectorized NumPy over the whole chunk.
"""

from __future__ import annotations

import numpy as np


def count_compatible_masks(
    n: int,
    tails: np.ndarray,
    heads: np.ndarray,
    interior: np.ndarray,
    higher: np.ndarray,
    lo: int,
    hi: int,
) -> int:
    """Count compatible direction-masks in [lo, hi).

    Mask bit j set means edge j runs tails[j] -> heads[j], clear means the
    reverse.  `interior` marks vertices where sources/sinks are forbidden,
    `higher[v]` is a bitmask of the boundary vertices whose value is >= the
    value at boundary vertex v (zero for interior vertices).
    """
    m = len(tails)
    tails = [int(t) for t in tails]
    heads = [int(h) for h in heads]
    interior_ix = [v for v in range(n) if interior[v]]
    higher = [int(x) for x in higher]
    count = 0
    for mask in range(lo, hi):
        tail_of = [0] * m
        head_of = [0] * m
        indeg = [0] * n
        outdeg = [0] * n
        for j in range(m):
            if (mask >> j) & 1:
                t, h = tails[j], heads[j]
            else:
                t, h = heads[j], tails[j]
            tail_of[j] = t
            head_of[j] = h
            outdeg[t] += 1
            indeg[h] += 1
        if any(indeg[v] == 0 or outdeg[v] == 0 for v in interior_ix):
            continue
        # Kahn topological order
        out_adj: list[list[int]] = [[] for _ in range(n)]
        for j in range(m):
            out_adj[tail_of[j]].append(head_of[j])
        pending = indeg[:]
        queue = [v for v in range(n) if pending[v] == 0]
        order = []
        while queue:
            v = queue.pop()
            order.append(v)
            for w in out_adj[v]:
                pending[w] -= 1
                if pending[w] == 0:
                    queue.append(w)
        if len(order) < n:
            continue  # cycle
        reach = [0] * n
        for v in reversed(order):
            r = 1 << v
            for w in out_adj[v]:
                r |= reach[w]
            reach[v] = r
        if any(reach[v] & higher[v] for v in range(n)):
            continue
        count += 1
    return count


def integrand_batch(
    n_int: int,
    tails: np.ndarray,
    heads: np.ndarray,
    bvals: np.ndarray,
    conduct: np.ndarray,
) -> np.ndarray:
    """Evaluate the simplex integrand for each conductance row.

    Vertices 0..n_int-1 are interior, the rest boundary with values
    bvals[v].  For each row c: solve the Dirichlet problem, then return
    prod_e (h_u - h_v)^2 / Z^m with Z = sum_e c_e (h_u - h_v)^2.
    """
    conduct = np.asarray(conduct, dtype=np.float64)
    rows, m = conduct.shape
    n_total = len(bvals)
    A = np.zeros((rows, n_int, n_int))
    rhs = np.zeros((rows, n_int))
    for j in range(m):
        c = conduct[:, j]
        t, h = int(tails[j]), int(heads[j])
        if t < n_int and h < n_int:
            A[:, t, t] += c
            A[:, h, h] += c
            A[:, t, h] -= c
            A[:, h, t] -= c
        elif t < n_int:
            A[:, t, t] += c
            rhs[:, t] += c * bvals[h]
        elif h < n_int:
            A[:, h, h] += c
            rhs[:, h] += c * bvals[t]
    x = np.linalg.solve(A, rhs[..., None])[..., 0]
    hfull = np.empty((rows, n_total))
    hfull[:, :n_int] = x
    hfull[:, n_int:] = bvals[np.newaxis, n_int:]
    d2 = (hfull[:, tails] - hfull[:, heads]) ** 2
    z = np.einsum("ij,ij->i", conduct, d2)
    # accumulate as prod(d2_e / Z) to keep intermediates in range
    return (d2 / z[:, None]).prod(axis=1)
