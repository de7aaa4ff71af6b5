"""Independent reference implementations the tests check the package against.

Everything here is written from the definitions, in a deliberately different
style from the package code: dict adjacency, python ints, exhaustive search.
Slow is fine; agreeing with the fast code is the point.
"""

import math
from itertools import combinations

import numpy as np
from numba import njit


def adjacency(ids, edges):
    adj = {pid: {} for pid in ids}
    for a, b, w in edges:
        adj[a][b] = adj[a].get(b, 0) + w
        adj[b][a] = adj[b].get(a, 0) + w
    return adj


# -- cascade / seed sets ------------------------------------------------------


def cascade_rounds(adj, seeds):
    """Synchronous majority cascade; returns {person: round infected}."""
    thresh = {v: math.ceil(len(nbrs) / 2) for v, nbrs in adj.items()}
    infected = set(seeds)
    round_of = {v: 0 for v in infected}
    rnd = 0
    while True:
        rnd += 1
        newly = {
            v
            for v in adj
            if v not in infected
            and len(set(adj[v]) & infected) >= thresh[v]
        }
        if not newly:
            break
        for v in newly:
            round_of[v] = rnd
        infected |= newly
    return round_of


def seed_infects_all(adj, seeds):
    return len(cascade_rounds(adj, seeds)) == len(adj)


def min_seed_size(adj):
    """Exhaustive smallest seed size; only sane for ~12 nodes."""
    order = sorted(adj)
    for size in range(len(order) + 1):
        for combo in combinations(order, size):
            if seed_infects_all(adj, combo):
                return size
    raise AssertionError("unreachable: seeding everyone always works")


# -- k-core -------------------------------------------------------------------


def core_numbers_definitional(adj):
    """core(v) = largest k such that v survives k-core peeling."""
    core = {v: 0 for v in adj}
    max_deg = max((len(nbrs) for nbrs in adj.values()), default=0)
    for k in range(max_deg + 1):
        alive = set(adj)
        changed = True
        while changed:
            drop = {v for v in alive if sum(1 for u in adj[v] if u in alive) < k}
            changed = bool(drop)
            alive -= drop
        for v in alive:
            core[v] = k
    return core


# -- modularity ---------------------------------------------------------------


def modularity_double_sum(ids, edges, communities):
    """Plain float double sum over all ordered vertex pairs."""
    adj = adjacency(ids, edges)
    two_m = sum(w for _, _, w in edges) * 2
    if two_m == 0:
        raise ValueError("no edges")
    strength = {v: sum(adj[v].values()) for v in ids}
    label = {}
    for ci, block in enumerate(communities):
        for v in block:
            label[v] = ci
    total = 0.0
    for u in ids:
        for v in ids:
            if label[u] != label[v]:
                continue
            a_uv = adj[u].get(v, 0)
            total += a_uv - strength[u] * strength[v] / two_m
    return total / two_m


@njit(cache=True)
def _best_partition_score(w_dense, strength, two_m):  # pragma: no cover
    n = strength.size
    labels = np.zeros(n, dtype=np.int64)
    best = np.zeros(n, dtype=np.int64)
    best_score = -(1 << 62)
    tot = np.zeros(n, dtype=np.int64)
    while True:
        # score this restricted-growth labelling in exact integers
        intra = 0
        for i in range(n):
            tot[i] = 0
        for i in range(n):
            tot[labels[i]] += strength[i]
            for j in range(n):
                if labels[i] == labels[j]:
                    intra += w_dense[i, j]
        sum_sq = 0
        for i in range(n):
            sum_sq += tot[i] * tot[i]
        score = intra * two_m - sum_sq
        if score > best_score:
            best_score = score
            best[:] = labels
        # next restricted-growth string
        pos = n - 1
        while pos > 0:
            prefix_max = 0
            for i in range(pos):
                if labels[i] > prefix_max:
                    prefix_max = labels[i]
            if labels[pos] <= prefix_max:
                labels[pos] += 1
                for i in range(pos + 1, n):
                    labels[i] = 0
                break
            pos -= 1
        if pos == 0:
            return best_score, best


def brute_force_best_partition(ids, edges):
    """Exhaustive maximum-modularity partition; exact integer scoring.

    Returns (modularity, communities). Feasible up to ~12 nodes.
    """
    order = sorted(ids)
    idx = {v: i for i, v in enumerate(order)}
    n = len(order)
    w_dense = np.zeros((n, n), dtype=np.int64)
    for a, b, w in edges:
        w_dense[idx[a], idx[b]] += w
        w_dense[idx[b], idx[a]] += w
    strength = w_dense.sum(axis=1)
    two_m = int(strength.sum())
    if two_m == 0:
        raise ValueError("no edges")
    score, labels = _best_partition_score(w_dense, strength, two_m)
    groups = {}
    for i, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(order[i])
    communities = sorted(groups.values(), key=lambda blk: (-len(blk), blk[0]))
    return score / (two_m * two_m), communities


# -- influence learning ---------------------------------------------------------


def influence_curve(ids, edges, admitted, z=1.96):
    """R[1..d*] from the definition: per-level admitted share minus z SER."""
    adj = adjacency(ids, edges)
    d_star = max((len(adj[v]) for v in ids), default=0)
    counts = {v: sum(1 for u in adj[v] if u in admitted) for v in ids}
    curve = [0.0]
    for level in range(1, d_star + 1):
        at_least = [v for v in ids if counts[v] >= level]
        tot = len(at_least)
        if tot == 0:
            curve.append(curve[-1])
            continue
        pos = sum(1 for v in at_least if v in admitted)
        p = pos / tot
        ser = math.sqrt(p * (1 - p) / tot)
        lower = min(max(p - z * ser, 0.0), 1.0)
        curve.append(max(curve[-1], lower))
    return curve
