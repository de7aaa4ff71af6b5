#!/usr/bin/env python3
"""Time the hot kernels on realistic workloads.

Run directly to benchmark whichever backend the environment selects
(numba by default, numpy with COARREST_NO_NUMBA=1). Run with --compare
to execute both backends in subprocesses and print a speedup table.
"""

import argparse
import json
import os
import random
import subprocess
import sys
import time

import numpy as np

from coarrest.community import louvain
from coarrest.graph import CoArrestNetwork, PersonNode, build_network
from coarrest.ingest import (
    derive_coarrest_edges,
    merge_edges,
    parse_arrests,
    parse_relationships,
    relationship_edges,
)
from coarrest.kernels import (
    BACKEND,
    core_numbers,
    count_marked_neighbors,
    modularity_value,
    seed_decomposition,
    threshold_cascade,
)
from coarrest.synth import SynthConfig, generate


def synth_network() -> CoArrestNetwork:
    res = generate(SynthConfig(seed=0))
    arrests, _ = parse_arrests(res.arrests_csv)
    rels, _ = parse_relationships(res.relationships_csv)
    return build_network(arrests, extra_edges=merge_edges(
        derive_coarrest_edges(arrests), relationship_edges(rels)))


def er_network(n: int, avg_degree: float, seed: int) -> CoArrestNetwork:
    # G(n, m) by rejection; fast enough and fully deterministic
    rng = np.random.default_rng(seed)
    m = int(n * avg_degree / 2)
    pairs = rng.integers(0, n, size=(int(m * 1.4), 2), dtype=np.int64)
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    pairs = np.unique(np.sort(pairs, axis=1), axis=0)[:m]
    weights = rng.integers(1, 4, size=pairs.shape[0])
    ids = [f"v{i:06d}" for i in range(n)]
    nodes = [PersonNode(pid) for pid in ids]
    edges = [(ids[a], ids[b], int(w)) for (a, b), w in zip(pairs, weights)]
    return CoArrestNetwork(nodes, edges)


def workloads() -> dict:
    synth = synth_network()
    er = er_network(8000, 10.0, seed=1)
    rng = random.Random(2)

    marked_synth = np.array(
        [rng.random() < 0.3 for _ in range(synth.node_count)], dtype=np.bool_)
    marked_er = np.array(
        [rng.random() < 0.3 for _ in range(er.node_count)], dtype=np.bool_)
    labels_er = np.array(
        [rng.randrange(40) for _ in range(er.node_count)], dtype=np.int64)
    seeds_synth = seed_decomposition(synth.indptr, synth.indices)[0]
    seeds_er = seed_decomposition(er.indptr, er.indices)[0]
    no_loops_er = np.zeros(er.node_count, dtype=np.int64)

    return {
        "seed_decomposition/synth1k": lambda: seed_decomposition(
            synth.indptr, synth.indices),
        "seed_decomposition/er8k": lambda: seed_decomposition(
            er.indptr, er.indices),
        "cascade/er8k": lambda: threshold_cascade(
            er.indptr, er.indices, seeds_er),
        "cascade/synth1k": lambda: threshold_cascade(
            synth.indptr, synth.indices, seeds_synth),
        "core_numbers/er8k": lambda: core_numbers(er.indptr, er.indices),
        "count_marked/synth1k": lambda: count_marked_neighbors(
            synth.indptr, synth.indices, marked_synth),
        "count_marked/er8k": lambda: count_marked_neighbors(
            er.indptr, er.indices, marked_er),
        "modularity/er8k": lambda: modularity_value(
            er.indptr, er.indices, er.weights, labels_er),
        "louvain/synth1k": lambda: louvain(synth),
        "louvain/er8k": lambda: louvain(er),
    }


def run_benchmarks(repeat: int) -> dict:
    results = {}
    for name, fn in workloads().items():
        fn()  # warm: jit compilation must not land in the timing
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        results[name] = best
    return {"backend": BACKEND, "results": results}


def compare(repeat: int) -> int:
    timings = {}
    for flag, label in (("0", "numba"), ("1", "numpy")):
        env = dict(os.environ, COARREST_NO_NUMBA=flag)
        proc = subprocess.run(
            [sys.executable, __file__, "--json", "--repeat", str(repeat)],
            env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            sys.stderr.write(proc.stderr)
            return proc.returncode
        payload = json.loads(proc.stdout)
        if payload["backend"] != label:
            print(f"note: requested {label} backend, got "
                  f"{payload['backend']} (numba unavailable?)")
        timings[label] = payload["results"]

    width = max(len(name) for name in timings["numba"])
    print(f"{'workload':<{width}}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    for name in timings["numba"]:
        fast = timings["numba"][name]
        slow = timings["numpy"][name]
        print(f"{name:<{width}}  {fast * 1e3:>8.2f}ms  {slow * 1e3:>8.2f}ms"
              f"  {slow / fast:>7.1f}x")
    return 0


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5,
                        help="timed repetitions per workload (best-of)")
    parser.add_argument("--json", action="store_true",
                        help="emit machine-readable results")
    parser.add_argument("--compare", action="store_true",
                        help="run both backends and print a speedup table")
    args = parser.parse_args()

    if args.compare:
        return compare(args.repeat)
    payload = run_benchmarks(args.repeat)
    if args.json:
        print(json.dumps(payload))
    else:
        print(f"backend: {payload['backend']}")
        for name, seconds in payload["results"].items():
            print(f"{name:<28} {seconds * 1e3:>10.2f}ms")
    return 0


if __name__ == "__main__":
    sys.exit(main())
