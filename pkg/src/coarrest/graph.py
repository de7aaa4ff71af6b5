"""Weighted undirected co-arrest network.

Persons are nodes; an edge's integer weight counts how many arrests the two
endpoints shared. The structure is immutable after construction and keeps a
CSR adjacency over dense indices (person ids sorted lexicographically), which
is what the numeric kernels consume.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .ingest import ArrestRecord, derive_coarrest_edges, merge_edges


@dataclass(frozen=True)
class PersonNode:
    """One person: identity plus what ingestion established about them."""

    id: str
    admitted_gangs: tuple[str, ...] = ()
    arrest_count: int = 0

    @property
    def admitted(self) -> bool:
        return bool(self.admitted_gangs)


class CoArrestNetwork:
    """Undirected weighted graph over persons, CSR-backed.

    Node order is fixed: person ids sorted lexicographically map to dense
    indices 0..n-1. Two degree notions coexist and both matter: ``degree``
    counts distinct neighbours, ``strength`` sums incident edge weights.
    """

    def __init__(self, nodes: Iterable[PersonNode], edges: Iterable[tuple[str, str, int]]):
        node_list = sorted(nodes, key=lambda nd: nd.id)
        self.nodes: tuple[PersonNode, ...] = tuple(node_list)
        self.ids: tuple[str, ...] = tuple(nd.id for nd in node_list)
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate person ids")
        self.index: dict[str, int] = {pid: i for i, pid in enumerate(self.ids)}

        canon: dict[tuple[str, str], int] = {}
        for a, b, w in edges:
            if a == b:
                raise ValueError(f"self-loop on {a!r}")
            if a not in self.index or b not in self.index:
                missing = a if a not in self.index else b
                raise ValueError(f"edge endpoint {missing!r} is not a node")
            if int(w) <= 0:
                raise ValueError(f"edge ({a!r}, {b!r}) has non-positive weight {w}")
            key = (a, b) if a < b else (b, a)
            canon[key] = canon.get(key, 0) + int(w)
        self._edges: tuple[tuple[str, str, int], ...] = tuple(
            (a, b, w) for (a, b), w in sorted(canon.items())
        )

        n = len(self.ids)
        m2 = 2 * len(self._edges)
        src = np.empty(m2, dtype=np.int64)
        dst = np.empty(m2, dtype=np.int64)
        wgt = np.empty(m2, dtype=np.int64)
        for k, (a, b, w) in enumerate(self._edges):
            ia, ib = self.index[a], self.index[b]
            src[2 * k], dst[2 * k], wgt[2 * k] = ia, ib, w
            src[2 * k + 1], dst[2 * k + 1], wgt[2 * k + 1] = ib, ia, w
        order = np.lexsort((dst, src))
        src, dst, wgt = src[order], dst[order], wgt[order]
        self.indptr: np.ndarray = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.indptr, src + 1, 1)
        np.cumsum(self.indptr, out=self.indptr)
        self.indices: np.ndarray = dst
        self.weights: np.ndarray = wgt

        self.degrees: np.ndarray = np.diff(self.indptr)
        self.strengths: np.ndarray = np.zeros(n, dtype=np.int64)
        np.add.at(self.strengths, src, wgt)
        # handshake: every edge contributes its weight to both endpoints
        assert int(self.strengths.sum()) == int(wgt.sum())

    # -- size ---------------------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self.ids)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    @property
    def total_weight(self) -> int:
        """m: sum of edge weights (each undirected edge counted once)."""
        return int(self.weights.sum()) // 2

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, person_id: str) -> bool:
        return person_id in self.index

    def __repr__(self) -> str:
        return (
            f"CoArrestNetwork(nodes={self.node_count}, edges={self.edge_count}, "
            f"total_weight={self.total_weight})"
        )

    # -- lookups ------------------------------------------------------------

    def node(self, person_id: str) -> PersonNode:
        return self.nodes[self.index[person_id]]

    def degree(self, person_id: str) -> int:
        return int(self.degrees[self.index[person_id]])

    def strength(self, person_id: str) -> int:
        return int(self.strengths[self.index[person_id]])

    def neighbors(self, person_id: str) -> list[str]:
        i = self.index[person_id]
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return [self.ids[j] for j in self.indices[lo:hi]]

    def neighbor_indices(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def weight(self, a: str, b: str) -> int:
        i, j = self.index[a], self.index[b]
        lo, hi = self.indptr[i], self.indptr[i + 1]
        pos = np.searchsorted(self.indices[lo:hi], j)
        if pos < hi - lo and self.indices[lo + pos] == j:
            return int(self.weights[lo + pos])
        return 0

    def edge_list(self) -> list[tuple[str, str, int]]:
        return list(self._edges)

    # -- gang bookkeeping ---------------------------------------------------

    def gangs(self) -> list[str]:
        out: set[str] = set()
        for nd in self.nodes:
            out.update(nd.admitted_gangs)
        return sorted(out)

    def members(self, gang: str) -> list[str]:
        return [nd.id for nd in self.nodes if gang in nd.admitted_gangs]

    def admitted_mask(self, gang: str) -> np.ndarray:
        mask = np.zeros(self.node_count, dtype=bool)
        for i, nd in enumerate(self.nodes):
            if gang in nd.admitted_gangs:
                mask[i] = True
        return mask

    def any_admitted_mask(self) -> np.ndarray:
        return np.array([nd.admitted for nd in self.nodes], dtype=bool)

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "nodes": [
                {
                    "id": nd.id,
                    "admitted_gangs": list(nd.admitted_gangs),
                    "arrest_count": nd.arrest_count,
                }
                for nd in self.nodes
            ],
            "edges": [{"a": a, "b": b, "weight": w} for a, b, w in self._edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json_dict(cls, payload: dict) -> "CoArrestNetwork":
        try:
            nodes = [
                PersonNode(
                    id=nd["id"],
                    admitted_gangs=tuple(sorted(nd.get("admitted_gangs", []))),
                    arrest_count=int(nd.get("arrest_count", 0)),
                )
                for nd in payload["nodes"]
            ]
            edges = [(e["a"], e["b"], int(e["weight"])) for e in payload["edges"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed network payload: {exc}") from exc
        return cls(nodes, edges)

    @classmethod
    def from_json(cls, text: str) -> "CoArrestNetwork":
        return cls.from_json_dict(json.loads(text))


def build_network(
    arrests: Iterable[ArrestRecord],
    extra_edges: Iterable[tuple[str, str, int]] | None = None,
) -> CoArrestNetwork:
    """Assemble the network from arrest records plus optional explicit edges.

    Every person appearing in any arrest becomes a node, including people
    arrested only alone. A person is admitted to every gang they claimed in
    at least one arrest. Edge weights from the arrest table and from
    ``extra_edges`` accumulate.
    """
    arrests = list(arrests)
    claims: dict[str, set[str]] = {}
    arrest_ids: dict[str, set[str]] = {}
    for rec in arrests:
        claims.setdefault(rec.person_id, set())
        arrest_ids.setdefault(rec.person_id, set()).add(rec.arrest_id)
        if rec.gang_claim is not None:
            claims[rec.person_id].add(rec.gang_claim)
    edges = derive_coarrest_edges(arrests)
    if extra_edges is not None:
        edges = merge_edges(edges, extra_edges)
    for a, b, _ in edges:
        claims.setdefault(a, set())
        claims.setdefault(b, set())
        arrest_ids.setdefault(a, set())
        arrest_ids.setdefault(b, set())
    nodes = [
        PersonNode(pid, tuple(sorted(claims[pid])), len(arrest_ids[pid]))
        for pid in claims
    ]
    return CoArrestNetwork(nodes, edges)


def induced_subgraph(
    net: CoArrestNetwork,
    keep: Iterable[str] | Callable[[PersonNode], bool],
) -> CoArrestNetwork:
    """Subgraph on a node subset; edges survive iff both endpoints do."""
    if callable(keep):
        kept = {nd.id for nd in net.nodes if keep(nd)}
    else:
        kept = set(keep)
        unknown = kept - set(net.ids)
        if unknown:
            raise KeyError(f"not in network: {sorted(unknown)[:5]}")
    nodes = [nd for nd in net.nodes if nd.id in kept]
    edges = [(a, b, w) for a, b, w in net.edge_list() if a in kept and b in kept]
    return CoArrestNetwork(nodes, edges)


def connected_components(net: CoArrestNetwork) -> list[list[str]]:
    """Components as sorted id lists, ordered by size desc then smallest id."""
    n = net.node_count
    comp = np.full(n, -1, dtype=np.int64)
    n_comp = 0
    for start in range(n):
        if comp[start] >= 0:
            continue
        comp[start] = n_comp
        stack = [start]
        while stack:
            u = stack.pop()
            for v in net.neighbor_indices(u):
                if comp[v] < 0:
                    comp[v] = n_comp
                    stack.append(int(v))
        n_comp += 1
    groups: list[list[str]] = [[] for _ in range(n_comp)]
    for i, c in enumerate(comp):
        groups[c].append(net.ids[i])  # ids are sorted, so each group is too
    groups.sort(key=lambda g: (-len(g), g[0]))
    return groups
