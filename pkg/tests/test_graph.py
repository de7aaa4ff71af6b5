import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coarrest.graph import (
    CoArrestNetwork,
    PersonNode,
    build_network,
    connected_components,
    induced_subgraph,
)
from coarrest.ingest import ArrestRecord

from conftest import net_from_edges


def test_edges_canonicalize_and_accumulate():
    net = net_from_edges([("b", "a", 2), ("a", "b", 3), ("b", "c", 1)])
    assert net.edge_list() == [("a", "b", 5), ("b", "c", 1)]
    assert net.weight("a", "b") == 5
    assert net.weight("b", "a") == 5
    assert net.weight("a", "c") == 0
    assert net.total_weight == 6


def test_rejects_bad_construction():
    nodes = [PersonNode("a"), PersonNode("b")]
    with pytest.raises(ValueError, match="self-loop"):
        CoArrestNetwork(nodes, [("a", "a", 1)])
    with pytest.raises(ValueError, match="not a node"):
        CoArrestNetwork(nodes, [("a", "zz", 1)])
    with pytest.raises(ValueError, match="weight"):
        CoArrestNetwork(nodes, [("a", "b", 0)])
    with pytest.raises(ValueError, match="duplicate"):
        CoArrestNetwork([PersonNode("a"), PersonNode("a")], [])


def test_csr_layout_sorted_and_symmetric(two_cliques):
    net = two_cliques
    for i in range(net.node_count):
        row = net.neighbor_indices(i)
        assert list(row) == sorted(row)
        assert i not in row
        for j in row:
            assert i in net.neighbor_indices(int(j))
    # handshake between the two degree notions
    assert int(net.strengths.sum()) == 2 * net.total_weight
    assert int(net.degrees.sum()) == 2 * net.edge_count


def test_degree_vs_strength():
    net = net_from_edges([("a", "b", 4), ("a", "c", 1)])
    assert net.degree("a") == 2
    assert net.strength("a") == 5
    assert net.neighbors("a") == ["b", "c"]


def test_gang_bookkeeping():
    net = net_from_edges(
        [("a", "b"), ("b", "c")],
        claims={"a": ("Reds",), "c": ("Blues", "Reds")},
    )
    assert net.gangs() == ["Blues", "Reds"]
    assert net.members("Reds") == ["a", "c"]
    assert list(net.admitted_mask("Blues")) == [False, False, True]
    assert list(net.any_admitted_mask()) == [True, False, True]


def test_build_network_from_arrests():
    records = [
        ArrestRecord("A1", "p1", "Reds"),
        ArrestRecord("A1", "p2", None),
        ArrestRecord("A2", "p1", "Blues"),
        ArrestRecord("A3", "p9", None),
    ]
    net = build_network(records)
    assert net.node_count == 3  # p9 arrested alone still becomes a node
    assert net.node("p1").admitted_gangs == ("Blues", "Reds")
    assert net.node("p1").arrest_count == 2
    assert net.node("p9").arrest_count == 1
    assert net.edge_list() == [("p1", "p2", 1)]


def test_build_network_merges_relationship_edges():
    records = [ArrestRecord("A1", "p1"), ArrestRecord("A1", "p2")]
    net = build_network(records, [("p2", "p3", 2), ("p1", "p2", 1)])
    assert net.weight("p1", "p2") == 2
    assert net.weight("p2", "p3") == 2
    assert net.node("p3").arrest_count == 0


def test_json_round_trip(two_cliques):
    net = two_cliques
    clone = CoArrestNetwork.from_json(net.to_json())
    assert clone.edge_list() == net.edge_list()
    assert clone.ids == net.ids
    assert net.to_json() == clone.to_json()


def test_from_json_dict_rejects_malformed():
    with pytest.raises(ValueError, match="malformed"):
        CoArrestNetwork.from_json_dict({"nodes": [{"no_id": 1}], "edges": []})
    with pytest.raises(ValueError, match="malformed"):
        CoArrestNetwork.from_json_dict({"nodes": []})


def test_induced_subgraph(two_cliques):
    sub = induced_subgraph(two_cliques, ["a1", "a2", "b1"])
    assert sub.node_count == 3
    assert sub.edge_list() == [("a1", "a2", 1), ("a1", "b1", 1)]
    with pytest.raises(KeyError):
        induced_subgraph(two_cliques, ["a1", "nope"])
    only_a = induced_subgraph(two_cliques, lambda nd: nd.id.startswith("a"))
    assert only_a.node_count == 4
    assert only_a.edge_count == 6


def test_connected_components_ordering():
    net = net_from_edges(
        [("a", "b"), ("c", "d"), ("c", "e")], extra_nodes=["zz"]
    )
    comps = connected_components(net)
    assert comps == [["c", "d", "e"], ["a", "b"], ["zz"]]


@given(
    st.lists(
        st.tuples(st.integers(0, 19), st.integers(0, 19), st.integers(1, 5)),
        max_size=60,
    )
)
@settings(max_examples=60, deadline=None)
def test_strength_equals_incident_weight_sum(raw):
    edges = [(f"n{a:02d}", f"n{b:02d}", w) for a, b, w in raw if a != b]
    if not edges:
        return
    net = net_from_edges(edges)
    for pid in net.ids:
        expected = sum(w for a, b, w in net.edge_list() if pid in (a, b))
        assert net.strength(pid) == expected
    assert sum(net.degree(p) for p in net.ids) == 2 * net.edge_count
