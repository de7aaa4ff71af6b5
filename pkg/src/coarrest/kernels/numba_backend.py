"""Numba-jitted kernel implementations.

Explicit-loop mirrors of numpy_backend with identical semantics: same visit
orders, same tie-breaking, int64 accumulation, one trailing float division.
Keeping the arithmetic integer-exact is what lets the backend-agreement
tests demand equality instead of tolerances.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_INT_MAX = np.iinfo(np.int64).max


@njit(cache=True, nogil=True)
def seed_decomposition(indptr, indices):
    n = indptr.size - 1
    dist = np.empty(n, np.int64)
    for i in range(n):
        dist[i] = (indptr[i + 1] - indptr[i]) // 2
    alive = np.ones(n, np.bool_)
    saturated = np.zeros(n, np.bool_)
    order = np.empty(n, np.int64)
    removal_dist = np.empty(n, np.int64)
    removed = 0
    while True:
        v = -1
        best = _INT_MAX
        for i in range(n):
            if alive[i] and not saturated[i] and dist[i] < best:
                best = dist[i]
                v = i
        if v < 0:
            break
        order[removed] = v
        removal_dist[removed] = dist[v]
        removed += 1
        alive[v] = False
        for e in range(indptr[v], indptr[v + 1]):
            j = indices[e]
            if alive[j] and not saturated[j]:
                if dist[j] > 0:
                    dist[j] -= 1
                else:
                    saturated[j] = True
    return alive, order[:removed].copy(), removal_dist[:removed].copy()


@njit(cache=True, nogil=True)
def threshold_cascade(indptr, indices, seeds):
    n = indptr.size - 1
    round_of = np.full(n, -1, np.int64)
    infected = np.zeros(n, np.bool_)
    for i in range(n):
        if seeds[i]:
            infected[i] = True
            round_of[i] = 0
    rounds = 0
    newly = np.zeros(n, np.bool_)
    while True:
        any_new = False
        for v in range(n):
            newly[v] = False
            if infected[v]:
                continue
            cnt = 0
            for e in range(indptr[v], indptr[v + 1]):
                if infected[indices[e]]:
                    cnt += 1
            # cnt >= ceil(deg/2) rewritten without division
            if 2 * cnt >= indptr[v + 1] - indptr[v]:
                newly[v] = True
                any_new = True
        if not any_new:
            break
        rounds += 1
        for v in range(n):
            if newly[v]:
                infected[v] = True
                round_of[v] = rounds
    return round_of, rounds


@njit(cache=True, nogil=True)
def core_numbers(indptr, indices):
    n = indptr.size - 1
    core = np.empty(n, np.int64)
    if n == 0:
        return core
    md = 0
    for i in range(n):
        d = indptr[i + 1] - indptr[i]
        core[i] = d
        if d > md:
            md = d
    # bucket sort vertices by degree, then peel in place
    bins = np.zeros(md + 2, np.int64)
    for i in range(n):
        bins[core[i]] += 1
    start = 0
    for d in range(md + 1):
        c = bins[d]
        bins[d] = start
        start += c
    pos = np.empty(n, np.int64)
    vert = np.empty(n, np.int64)
    for v in range(n):
        pos[v] = bins[core[v]]
        vert[pos[v]] = v
        bins[core[v]] += 1
    for d in range(md, 0, -1):
        bins[d] = bins[d - 1]
    bins[0] = 0
    for idx in range(n):
        v = vert[idx]
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if core[u] > core[v]:
                du = core[u]
                pu = pos[u]
                pw = bins[du]
                w = vert[pw]
                if u != w:
                    vert[pu] = w
                    vert[pw] = u
                    pos[u] = pw
                    pos[w] = pu
                bins[du] += 1
                core[u] -= 1
    return core


@njit(cache=True, nogil=True)
def count_marked_neighbors(indptr, indices, marked):
    n = indptr.size - 1
    out = np.zeros(n, np.int64)
    for v in range(n):
        for e in range(indptr[v], indptr[v + 1]):
            if marked[indices[e]]:
                out[v] += 1
    return out


@njit(cache=True, nogil=True)
def modularity_value(indptr, indices, weights, labels):
    n = indptr.size - 1
    two_m = np.int64(0)
    for e in range(indices.size):
        two_m += weights[e]
    if two_m == 0:
        return 0.0
    strength = np.zeros(n, np.int64)
    intra = np.int64(0)
    for v in range(n):
        lv = labels[v]
        for e in range(indptr[v], indptr[v + 1]):
            strength[v] += weights[e]
            if labels[indices[e]] == lv:
                intra += weights[e]
    tot = np.zeros(n, np.int64)
    for v in range(n):
        tot[labels[v]] += strength[v]
    sum_sq = np.int64(0)
    for c in range(n):
        sum_sq += tot[c] * tot[c]
    return (intra * two_m - sum_sq) / (two_m * two_m)


@njit(cache=True, nogil=True)
def louvain_local_pass(indptr, indices, weights, self_loops, max_sweeps):
    n = indptr.size - 1
    strength = np.empty(n, np.int64)
    two_m = np.int64(0)
    for v in range(n):
        s = self_loops[v]
        for e in range(indptr[v], indptr[v + 1]):
            s += weights[e]
        strength[v] = s
        two_m += s
    labels = np.arange(n, dtype=np.int64)
    tot = strength.copy()
    comm_w = np.zeros(n, np.int64)
    cand = np.empty(n, np.int64)
    for _ in range(max_sweeps):
        moved = False
        for v in range(n):
            lo, hi = indptr[v], indptr[v + 1]
            c_old = labels[v]
            k_v = strength[v]
            tot[c_old] -= k_v
            ncand = 0
            for e in range(lo, hi):
                c = labels[indices[e]]
                # weights are strictly positive, so 0 means "not seen yet"
                if comm_w[c] == 0:
                    cand[ncand] = c
                    ncand += 1
                comm_w[c] += weights[e]
            if comm_w[c_old] == 0:
                cand[ncand] = c_old
                ncand += 1
            for a in range(1, ncand):  # insertion sort: ascending community id
                key = cand[a]
                b = a - 1
                while b >= 0 and cand[b] > key:
                    cand[b + 1] = cand[b]
                    b -= 1
                cand[b + 1] = key
            best = cand[0]
            best_score = two_m * comm_w[best] - tot[best] * k_v
            for a in range(1, ncand):
                c = cand[a]
                score = two_m * comm_w[c] - tot[c] * k_v
                if score > best_score:  # strict: lowest id wins ties
                    best_score = score
                    best = c
            tot[best] += k_v
            if best != c_old:
                labels[v] = best
                moved = True
            for a in range(ncand):
                comm_w[cand[a]] = 0
        if not moved:
            break
    return labels
