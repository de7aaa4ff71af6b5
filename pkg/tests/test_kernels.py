import os
import random
import subprocess
import sys

import numpy as np
import pytest

from coarrest.kernels import BACKEND, numpy_backend
from conftest import net_from_edges
from graphgen import erdos_renyi, planted
from oracles import adjacency, cascade_rounds, core_numbers_definitional

try:
    from coarrest.kernels import numba_backend
except ImportError:  # pragma: no cover
    numba_backend = None

BACKENDS = [numpy_backend] + ([numba_backend] if numba_backend else [])


def random_net(seed, n_max=40, weighted=True):
    rng = random.Random(seed)
    if seed % 3 == 0:
        sizes = [rng.randint(3, 8) for _ in range(rng.randint(2, 4))]
        ids, edges, _ = planted(sizes, 0.8, 0.1, rng, max_weight=4 if weighted else 1)
    else:
        n = rng.randint(2, n_max)
        ids, edges = erdos_renyi(n, rng.uniform(0.05, 0.5), rng,
                                 max_weight=4 if weighted else 1)
    return net_from_edges(edges, extra_nodes=ids)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__.split(".")[-1])
def test_cascade_matches_reference(backend):
    for seed in range(25):
        net = random_net(seed, weighted=False)
        rng = random.Random(100 + seed)
        seed_ids = {p for p in net.ids if rng.random() < 0.3}
        mask = np.array([p in seed_ids for p in net.ids])
        round_of, rounds = backend.threshold_cascade(net.indptr, net.indices, mask)
        adj = adjacency(net.ids, net.edge_list())
        for pid in net.ids:
            if pid not in adj:
                adj[pid] = {}
        expected = cascade_rounds(adj, seed_ids)
        got = {net.ids[i]: int(r) for i, r in enumerate(round_of) if r >= 0}
        assert got == expected
        assert rounds == max(expected.values(), default=0)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__.split(".")[-1])
def test_isolated_vertex_tips_in_round_one(backend):
    net = net_from_edges([("a", "b")], extra_nodes=["c"])
    mask = np.array([p == "a" for p in net.ids])
    round_of, _ = backend.threshold_cascade(net.indptr, net.indices, mask)
    by_id = dict(zip(net.ids, (int(r) for r in round_of)))
    assert by_id == {"a": 0, "b": 1, "c": 1}


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__.split(".")[-1])
def test_core_numbers_match_definition(backend):
    for seed in range(20):
        net = random_net(seed, weighted=False)
        got = backend.core_numbers(net.indptr, net.indices)
        adj = adjacency(net.ids, net.edge_list())
        for pid in net.ids:
            if pid not in adj:
                adj[pid] = {}
        expected = core_numbers_definitional(adj)
        assert {net.ids[i]: int(k) for i, k in enumerate(got)} == expected


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__.split(".")[-1])
def test_seed_decomposition_fixtures(backend):
    # every clique vertex starts with the same budget; ids break the ties
    k4 = net_from_edges(
        [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")]
    )
    alive, order, dists = backend.seed_decomposition(k4.indptr, k4.indices)
    assert [k4.ids[i] for i in order] == ["a", "b"]
    assert list(dists) == [1, 0]
    assert sorted(k4.ids[i] for i in np.flatnonzero(alive)) == ["c", "d"]

    star = net_from_edges([("z", leaf) for leaf in "abcd"])
    alive, order, _ = backend.seed_decomposition(star.indptr, star.indices)
    assert [star.ids[i] for i in np.flatnonzero(alive)] == ["z"]
    assert [star.ids[i] for i in order] == ["a", "b", "c", "d"]


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__.split(".")[-1])
def test_surviving_set_always_tips_everyone(backend):
    for seed in range(40):
        net = random_net(seed, weighted=False)
        alive, order, _ = backend.seed_decomposition(net.indptr, net.indices)
        assert len(order) + int(alive.sum()) == net.node_count
        round_of, _ = backend.threshold_cascade(net.indptr, net.indices, alive)
        assert (round_of >= 0).all()


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__.split(".")[-1])
def test_count_marked_neighbors(backend):
    for seed in range(15):
        net = random_net(seed)
        rng = random.Random(200 + seed)
        marked_ids = {p for p in net.ids if rng.random() < 0.4}
        mask = np.array([p in marked_ids for p in net.ids])
        got = backend.count_marked_neighbors(net.indptr, net.indices, mask)
        for i, pid in enumerate(net.ids):
            assert got[i] == sum(1 for nb in net.neighbors(pid) if nb in marked_ids)


def test_backends_agree_exactly():
    if numba_backend is None:
        pytest.skip("numba unavailable")
    for seed in range(30):
        net = random_net(seed)
        args = (net.indptr, net.indices)
        a1, o1, d1 = numpy_backend.seed_decomposition(*args)
        a2, o2, d2 = numba_backend.seed_decomposition(*args)
        assert np.array_equal(a1, a2) and np.array_equal(o1, o2)
        assert np.array_equal(d1, d2)

        c1 = numpy_backend.core_numbers(*args)
        c2 = numba_backend.core_numbers(*args)
        assert np.array_equal(c1, c2)

        r1, n1 = numpy_backend.threshold_cascade(*args, a1)
        r2, n2 = numba_backend.threshold_cascade(*args, a2)
        assert np.array_equal(r1, r2) and n1 == n2

        labels = (np.arange(net.node_count, dtype=np.int64) * 7) % max(
            net.node_count, 1
        )
        v1 = numpy_backend.modularity_value(*args, net.weights, labels)
        v2 = numba_backend.modularity_value(*args, net.weights, labels)
        assert v1 == v2  # bit-identical, not merely close

        sl = np.zeros(net.node_count, dtype=np.int64)
        l1 = numpy_backend.louvain_local_pass(*args, net.weights, sl, 256)
        l2 = numba_backend.louvain_local_pass(*args, net.weights, sl, 256)
        assert np.array_equal(l1, l2)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, COARREST_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from coarrest.kernels import BACKEND; print(BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    assert out.stdout.strip() == "numpy"


def test_active_backend_is_reported():
    assert BACKEND in {"numpy", "numba"}
