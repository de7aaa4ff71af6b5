import pytest

from coarrest.graph import CoArrestNetwork, PersonNode


def net_from_edges(edges, extra_nodes=(), claims=None, counts=None):
    """Build a network straight from an edge list, skipping ingestion.

    ``claims`` maps person id to a tuple of admitted gangs; everyone else is
    unadmitted. Node ids are collected from the edges plus ``extra_nodes``.
    """
    claims = claims or {}
    counts = counts or {}
    ids = set(extra_nodes)
    for a, b, *_ in edges:
        ids.add(a)
        ids.add(b)
    ids.update(claims)
    nodes = [
        PersonNode(pid, tuple(claims.get(pid, ())), counts.get(pid, 0))
        for pid in sorted(ids)
    ]
    norm = [(a, b, (rest[0] if rest else 1)) for a, b, *rest in edges]
    return CoArrestNetwork(nodes, norm)


@pytest.fixture
def triangle():
    return net_from_edges([("a", "b"), ("b", "c"), ("a", "c")])


@pytest.fixture
def star5():
    # hub sorts after the leaves on purpose; several tie-break tests need it
    return net_from_edges([("z", leaf) for leaf in "abcd"])


@pytest.fixture
def two_cliques():
    edges = []
    left = ["a1", "a2", "a3", "a4"]
    right = ["b1", "b2", "b3", "b4"]
    for grp in (left, right):
        edges.extend((grp[i], grp[j]) for i in range(4) for j in range(i + 1, 4))
    edges.append(("a1", "b1"))
    return net_from_edges(edges)
