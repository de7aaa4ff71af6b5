"""Pure-numpy kernel implementations.

These are the reference semantics; the jit backend must match them bit for
bit. All counting stays in int64 and the single float division happens at
the very end of modularity_value, so the two backends cannot drift apart
through rounding.
"""

from __future__ import annotations

import numpy as np

_INT_MAX = np.iinfo(np.int64).max


def _sources(indptr: np.ndarray) -> np.ndarray:
    """Per-edge source index for a CSR layout (length == indices.size)."""
    n = indptr.size - 1
    return np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))


def seed_decomposition(
    indptr: np.ndarray, indices: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Peel the graph down to a seed set under the majority-tipping rule.

    Every vertex starts with a budget of floor(degree/2). The vertex with
    the smallest unsaturated budget (ties to the lowest index) is removed;
    each surviving unsaturated neighbour either spends one budget point or,
    at zero, saturates permanently. Saturated vertices are never removed.
    Returns (alive mask, removal order, budget at removal time).
    """
    n = indptr.size - 1
    deg = np.diff(indptr)
    dist = deg // 2
    alive = np.ones(n, dtype=bool)
    saturated = np.zeros(n, dtype=bool)
    order = np.empty(n, dtype=np.int64)
    removal_dist = np.empty(n, dtype=np.int64)
    removed = 0
    while n:
        masked = np.where(alive & ~saturated, dist, _INT_MAX)
        v = int(np.argmin(masked))  # first minimum: lowest index wins ties
        if masked[v] == _INT_MAX:
            break
        order[removed] = v
        removal_dist[removed] = dist[v]
        removed += 1
        alive[v] = False
        for j in indices[indptr[v] : indptr[v + 1]]:
            if alive[j] and not saturated[j]:
                if dist[j] > 0:
                    dist[j] -= 1
                else:
                    saturated[j] = True
    return alive, order[:removed].copy(), removal_dist[:removed].copy()


def threshold_cascade(
    indptr: np.ndarray, indices: np.ndarray, seeds: np.ndarray
) -> tuple[np.ndarray, int]:
    """Run the synchronous majority cascade from a boolean seed mask.

    A vertex flips once at least ceil(degree/2) of its neighbours are
    infected; degree-0 vertices flip in round one. Returns the infection
    round per vertex (-1 never, 0 seed) and the number of rounds run.
    """
    n = indptr.size - 1
    deg = np.diff(indptr)
    thresh = (deg + 1) // 2
    src = _sources(indptr)
    infected = seeds.astype(bool).copy()
    round_of = np.full(n, -1, dtype=np.int64)
    round_of[infected] = 0
    rounds = 0
    while True:
        hits = np.bincount(src[infected[indices]], minlength=n)
        newly = ~infected & (hits >= thresh)
        if not newly.any():
            break
        rounds += 1
        infected |= newly
        round_of[newly] = rounds
    return round_of, rounds


def core_numbers(indptr: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """k-core (shell) number of every vertex, by definitional peeling."""
    n = indptr.size - 1
    src = _sources(indptr)
    cur = np.diff(indptr).astype(np.int64)
    core = np.zeros(n, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    remaining = n
    k = 0
    while remaining:
        peel = alive & (cur <= k)
        if not peel.any():
            k += 1
            continue
        while peel.any():
            core[peel] = k
            alive[peel] = False
            remaining -= int(peel.sum())
            hits = np.bincount(indices[peel[src]], minlength=n)
            cur -= hits
            peel = alive & (cur <= k)
    return core


def count_marked_neighbors(
    indptr: np.ndarray, indices: np.ndarray, marked: np.ndarray
) -> np.ndarray:
    """For every vertex, how many of its neighbours carry the mark."""
    n = indptr.size - 1
    src = _sources(indptr)
    sel = marked.astype(bool)[indices]
    return np.bincount(src[sel], minlength=n).astype(np.int64)


def modularity_value(
    indptr: np.ndarray,
    indices: np.ndarray,
    weights: np.ndarray,
    labels: np.ndarray,
) -> float:
    """Weighted modularity of a labelling; labels must lie in [0, n).

    Accumulates intra-community weight and community strengths in int64,
    then performs one float division, so the value is exactly reproducible.
    """
    n = indptr.size - 1
    src = _sources(indptr)
    two_m = int(weights.sum())
    if two_m == 0:
        return 0.0
    strength = np.zeros(n, dtype=np.int64)
    np.add.at(strength, src, weights)
    intra = int(weights[labels[src] == labels[indices]].sum())
    tot = np.zeros(n, dtype=np.int64)
    np.add.at(tot, labels, strength)
    sum_sq = int(np.dot(tot, tot))
    return (intra * two_m - sum_sq) / (two_m * two_m)


def louvain_local_pass(
    indptr: np.ndarray,
    indices: np.ndarray,
    weights: np.ndarray,
    self_loops: np.ndarray,
    max_sweeps: int,
) -> np.ndarray:
    """One level of greedy label moving; returns a label per vertex.

    Vertices are visited in ascending index order. A vertex joins the
    candidate community (its own plus its neighbours') with the best
    integer-scaled modularity gain; ties go to the lowest community id.
    Sweeps repeat until a full pass moves nothing or max_sweeps is hit.
    """
    n = indptr.size - 1
    src = _sources(indptr)
    strength = self_loops.astype(np.int64).copy()
    np.add.at(strength, src, weights)
    two_m = int(strength.sum())
    labels = np.arange(n, dtype=np.int64)
    tot = strength.copy()
    for _ in range(max_sweeps):
        moved = False
        for v in range(n):
            lo, hi = indptr[v], indptr[v + 1]
            c_old = int(labels[v])
            k_v = int(strength[v])
            tot[c_old] -= k_v
            cand, inv = np.unique(labels[indices[lo:hi]], return_inverse=True)
            w_to = np.zeros(cand.size, dtype=np.int64)
            np.add.at(w_to, inv, weights[lo:hi])
            pos = int(np.searchsorted(cand, c_old))
            if pos == cand.size or cand[pos] != c_old:
                cand = np.insert(cand, pos, c_old)
                w_to = np.insert(w_to, pos, 0)
            scores = two_m * w_to - tot[cand] * k_v
            best = int(cand[np.argmax(scores)])  # first max: lowest id wins
            tot[best] += k_v
            if best != c_old:
                labels[v] = best
                moved = True
        if not moved:
            break
    return labels
