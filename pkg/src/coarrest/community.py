"""Sub-group structure: modularity, partitions, ecosystems, connectors.

Gang subgraphs are partitioned into sub-groups by greedy modularity
optimization (Louvain-style local moves plus aggregation), then lifted to a
subgroup-level "ecosystem" graph around a focal gang. Connectors are the
individuals whose ties bridge multiple sub-groups.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .graph import CoArrestNetwork
from .kernels import louvain_local_pass, modularity_value

log = logging.getLogger(__name__)

MAX_SWEEPS = 256  # hard cap per level; normal convergence takes a handful


@dataclass
class Partition:
    """Disjoint communities covering all vertices, with their modularity.

    Communities are ordered by size descending, ties by smallest member id,
    so `<gang>.<index>` subgroup names are stable across runs.
    """

    communities: tuple[tuple[str, ...], ...]
    modularity: float

    def __len__(self) -> int:
        return len(self.communities)

    def labels(self) -> dict[str, int]:
        return {
            pid: idx for idx, comm in enumerate(self.communities) for pid in comm
        }

    def to_json_dict(self) -> dict:
        return {
            "communities": [list(c) for c in self.communities],
            "modularity": self.modularity,
        }


def _as_communities(partition) -> list[list[str]]:
    if isinstance(partition, Partition):
        return [list(c) for c in partition.communities]
    return [sorted(c) for c in partition]


def _labels_array(net: CoArrestNetwork, communities: list[list[str]]) -> np.ndarray:
    labels = np.full(net.node_count, -1, dtype=np.int64)
    placed = 0
    for idx, comm in enumerate(communities):
        for pid in comm:
            i = net.index.get(pid)
            if i is None:
                raise ValueError(f"partition names unknown person {pid!r}")
            if labels[i] != -1:
                raise ValueError(f"person {pid!r} appears in two communities")
            labels[i] = idx
            placed += 1
    if placed != net.node_count:
        raise ValueError("partition does not cover every person")
    return labels


def modularity(net: CoArrestNetwork, partition) -> float:
    """Weighted modularity of a partition; requires total weight m > 0.

    The inner sum runs over ordered pairs within each community, the null
    term uses weighted degrees, and the diagonal carries no edge weight.
    """
    if net.total_weight == 0:
        raise ValueError("modularity is undefined when total edge weight is zero")
    labels = _labels_array(net, _as_communities(partition))
    return float(modularity_value(net.indptr, net.indices, net.weights, labels))


def _aggregate(
    indptr: np.ndarray,
    indices: np.ndarray,
    weights: np.ndarray,
    self_loops: np.ndarray,
    compact: np.ndarray,
    n_comm: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Collapse communities into super-vertices, preserving total weight."""
    n = indptr.size - 1
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    cu = compact[src]
    cv = compact[indices]
    new_self = np.zeros(n_comm, dtype=np.int64)
    np.add.at(new_self, compact, self_loops)
    diag = cu == cv
    np.add.at(new_self, cu[diag], weights[diag])
    off = ~diag
    key = cu[off] * n_comm + cv[off]
    uniq, inv = np.unique(key, return_inverse=True)
    w_agg = np.zeros(uniq.size, dtype=np.int64)
    np.add.at(w_agg, inv, weights[off])
    new_indptr = np.zeros(n_comm + 1, dtype=np.int64)
    np.add.at(new_indptr, uniq // n_comm + 1, 1)
    np.cumsum(new_indptr, out=new_indptr)
    return new_indptr, uniq % n_comm, w_agg, new_self


def louvain(net: CoArrestNetwork) -> Partition:
    """Greedy modularity partition: local moves, aggregate, repeat.

    Fully deterministic: vertices are swept in ascending id order, gain ties
    break toward the lowest community id, and there is no random restart.
    """
    if net.total_weight == 0:
        raise ValueError("cannot partition a network with no edge weight")
    n = net.node_count
    indptr, indices, weights = net.indptr, net.indices, net.weights
    self_loops = np.zeros(n, dtype=np.int64)
    membership = np.arange(n, dtype=np.int64)  # original vertex -> super-vertex
    while True:
        local = louvain_local_pass(indptr, indices, weights, self_loops, MAX_SWEEPS)
        uniq = np.unique(local)
        if uniq.size == indptr.size - 1:
            break  # no merge happened at this level
        compact = np.searchsorted(uniq, local).astype(np.int64)
        membership = compact[membership]
        indptr, indices, weights, self_loops = _aggregate(
            indptr, indices, weights, self_loops, compact, uniq.size
        )

    groups: dict[int, list[str]] = {}
    for i, pid in enumerate(net.ids):
        groups.setdefault(int(membership[i]), []).append(pid)
    communities = sorted(groups.values(), key=lambda c: (-len(c), c[0]))
    labels = _labels_array(net, communities)
    value = float(modularity_value(net.indptr, net.indices, net.weights, labels))
    return Partition(tuple(tuple(c) for c in communities), value)


# -- subgroup naming ---------------------------------------------------------


def subgroup_map(
    partitions: Mapping[str, Partition],
) -> tuple[dict[str, list[str]], dict[str, tuple[str, tuple[str, ...]]]]:
    """Name every community `<gang>.<index>` and index both directions.

    Returns (person -> subgroup names, subgroup name -> (gang, members)).
    A person admitted to several gangs appears in one subgroup per gang.
    """
    person_subs: dict[str, list[str]] = {}
    info: dict[str, tuple[str, tuple[str, ...]]] = {}
    for gang in sorted(partitions):
        for idx, comm in enumerate(partitions[gang].communities, start=1):
            name = f"{gang}.{idx}"
            info[name] = (gang, comm)
            for pid in comm:
                person_subs.setdefault(pid, []).append(name)
    return person_subs, info


@dataclass(frozen=True)
class Connector:
    """A person whose ties reach several sub-groups beyond their own."""

    person: str
    touched: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {"person": self.person, "touched": list(self.touched)}


def find_connectors(
    net: CoArrestNetwork,
    partitions: Mapping[str, Partition],
    threshold: int = 2,
) -> list[Connector]:
    """People adjacent (or belonging, via multi-gang claims) to >= threshold
    sub-groups other than their own.

    A person in a single subgroup does not "touch" it; a person in several
    (one per claimed gang) touches all of their own, since each bridges the
    others. Sorted by touched count descending, then person id.
    """
    person_subs, _ = subgroup_map(partitions)
    out = []
    for pid in net.ids:
        own = set(person_subs.get(pid, ()))
        touched: set[str] = set()
        for nbr in net.neighbors(pid):
            touched.update(person_subs.get(nbr, ()))
        touched -= own
        if len(own) >= 2:
            touched |= own
        if len(touched) >= threshold:
            out.append(Connector(pid, tuple(sorted(touched))))
    out.sort(key=lambda c: (-len(c.touched), c.person))
    return out


# -- ecosystems ---------------------------------------------------------------


@dataclass(frozen=True)
class SubgroupNode:
    id: str
    gang: str
    size: int
    members: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "gang": self.gang,
            "size": self.size,
            "members": list(self.members),
        }


@dataclass(frozen=True)
class SubgroupEdge:
    """Tie bundle between two sub-groups.

    weight counts distinct person-level links: one per network edge crossing
    the pair plus one per person whose multiple gang claims bridge the pair.
    coarrest_weight additionally sums the co-arrest counts of the crossing
    edges. provenance is "social", "shared_member", or "both".
    """

    a: str
    b: str
    weight: int
    coarrest_weight: int
    provenance: str

    def to_json_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "weight": self.weight,
            "coarrest_weight": self.coarrest_weight,
            "provenance": self.provenance,
        }


@dataclass(frozen=True)
class Ecosystem:
    """Subgroup-level graph around one focal gang."""

    focal: str
    nodes: tuple[SubgroupNode, ...]
    edges: tuple[SubgroupEdge, ...]
    connectors: tuple[Connector, ...]

    def to_json_dict(self) -> dict:
        return {
            "focal": self.focal,
            "nodes": [n.to_json_dict() for n in self.nodes],
            "edges": [e.to_json_dict() for e in self.edges],
            "connectors": [c.to_json_dict() for c in self.connectors],
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "Ecosystem":
        return cls(
            focal=payload["focal"],
            nodes=tuple(
                SubgroupNode(n["id"], n["gang"], int(n["size"]), tuple(n["members"]))
                for n in payload["nodes"]
            ),
            edges=tuple(
                SubgroupEdge(
                    e["a"], e["b"], int(e["weight"]),
                    int(e["coarrest_weight"]), e["provenance"],
                )
                for e in payload["edges"]
            ),
            connectors=tuple(
                Connector(c["person"], tuple(c["touched"]))
                for c in payload["connectors"]
            ),
        )


def build_ecosystem(
    net: CoArrestNetwork,
    partitions: Mapping[str, Partition],
    focal: str,
    connector_threshold: int = 2,
    connectors: Iterable[Connector] | None = None,
) -> Ecosystem:
    """Lift person-level ties to the subgroup graph around a focal gang.

    Includes every focal subgroup plus exactly the foreign subgroups tied to
    at least one of them; ties among included foreign subgroups are kept so
    the neighbourhood reads as a graph, not a star.
    """
    if focal not in partitions:
        raise ValueError(f"no partition available for focal gang {focal!r}")
    person_subs, info = subgroup_map(partitions)

    ties: dict[tuple[str, str], list[int]] = {}  # (a,b) -> [social, weight, bridges]

    def bump(s: str, t: str, social: int = 0, weight: int = 0, bridge: int = 0) -> None:
        key = (s, t) if s < t else (t, s)
        rec = ties.setdefault(key, [0, 0, 0])
        rec[0] += social
        rec[1] += weight
        rec[2] += bridge

    for a, b, w in net.edge_list():
        for s in person_subs.get(a, ()):
            for t in person_subs.get(b, ()):
                if s != t:
                    bump(s, t, social=1, weight=w)
    for subs in person_subs.values():
        for i in range(len(subs)):
            for j in range(i + 1, len(subs)):
                bump(subs[i], subs[j], bridge=1)

    focal_names = [name for name in info if info[name][0] == focal]
    focal_set = set(focal_names)
    included = set(focal_names)
    # a foreign subgroup joins only through a tie to a focal subgroup
    for s, t in ties:
        if s in focal_set and t not in focal_set:
            included.add(t)
        elif t in focal_set and s not in focal_set:
            included.add(s)
    # focal subgroups first (already in index order), then foreign by name
    node_names = focal_names + sorted(n for n in included if n not in focal_names)

    nodes = tuple(
        SubgroupNode(name, info[name][0], len(info[name][1]), info[name][1])
        for name in node_names
    )
    edges = []
    for (s, t) in sorted(ties):
        if s not in included or t not in included:
            continue
        social, weight, bridges = ties[(s, t)]
        provenance = (
            "both" if social and bridges else "shared_member" if bridges else "social"
        )
        edges.append(SubgroupEdge(s, t, social + bridges, weight, provenance))

    if connectors is None:
        connectors = find_connectors(net, partitions, connector_threshold)
    relevant = tuple(
        c
        for c in connectors
        if included & (set(c.touched) | set(person_subs.get(c.person, ())))
    )
    return Ecosystem(focal, nodes, tuple(edges), relevant)
