"""Seed sets under the majority tipping model, plus cascade and shells.

A vertex adopts once at least half of its neighbours (rounded up) have.
find_seed_set peels the graph down to a set guaranteed to tip everyone;
simulate_cascade verifies any candidate set by exact simulation;
shell_numbers gives the standard k-core index used as a spread proxy.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from statistics import fmean
from typing import Iterable, Mapping

import numpy as np

from .graph import CoArrestNetwork, induced_subgraph
from .kernels import core_numbers, seed_decomposition, threshold_cascade

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SeedSetResult:
    """Outcome of one decomposition: who remains, and the removal story."""

    seed: tuple[str, ...]
    trace: tuple[tuple[str, int], ...]  # (person, budget at removal), in order

    @property
    def size(self) -> int:
        return len(self.seed)


def find_seed_set(net: CoArrestNetwork) -> SeedSetResult:
    """Peel low-budget vertices until only a guaranteed seed set remains.

    Budgets start at floor(degree/2). The lowest-budget vertex is removed
    (ties to the smallest person id); surviving neighbours pay one budget
    point or, at zero, saturate and become permanent. Survivors tip the
    whole graph under simulate_cascade.
    """
    alive, order, dist = seed_decomposition(net.indptr, net.indices)
    seed = tuple(net.ids[i] for i in np.flatnonzero(alive))
    trace = tuple((net.ids[v], int(d)) for v, d in zip(order, dist))
    return SeedSetResult(seed, trace)


@dataclass(frozen=True)
class CascadeResult:
    """Fixpoint of the synchronous majority cascade."""

    round_of: dict[str, int]  # infected person -> round (0 = seed)
    rounds: int

    @property
    def infected(self) -> frozenset[str]:
        return frozenset(self.round_of)

    def newly_by_round(self) -> tuple[tuple[str, ...], ...]:
        buckets: list[list[str]] = [[] for _ in range(self.rounds + 1)]
        for person in sorted(self.round_of):
            buckets[self.round_of[person]].append(person)
        return tuple(tuple(b) for b in buckets)


def simulate_cascade(net: CoArrestNetwork, seeds: Iterable[str]) -> CascadeResult:
    """Run the cascade from the given seeds to its fixpoint.

    An uninfected vertex flips in the round where its infected-neighbour
    count first reaches ceil(degree/2); isolated vertices have threshold 0
    and flip in round one. Unknown seed ids are an error.
    """
    mask = np.zeros(net.node_count, dtype=bool)
    for s in seeds:
        if s not in net.index:
            raise KeyError(f"seed {s!r} is not in the network")
        mask[net.index[s]] = True
    round_arr, rounds = threshold_cascade(net.indptr, net.indices, mask)
    round_of = {
        net.ids[i]: int(round_arr[i]) for i in np.flatnonzero(round_arr >= 0)
    }
    return CascadeResult(round_of, int(rounds))


def shell_numbers(net: CoArrestNetwork) -> dict[str, int]:
    """k-core index per person: the deepest shell the vertex survives into."""
    cores = core_numbers(net.indptr, net.indices)
    return {pid: int(cores[i]) for i, pid in enumerate(net.ids)}


@dataclass(frozen=True)
class GangSeeds:
    """Per-gang decomposition results on the admitted-member subgraph."""

    gang: str
    members: int
    seed: tuple[str, ...]
    seed_pct: float
    trace: tuple[tuple[str, int], ...]
    shells: dict[str, int]
    group: str | None = None

    def to_json_dict(self) -> dict:
        payload = {
            "gang": self.gang,
            "members": self.members,
            "seed": list(self.seed),
            "seed_pct": self.seed_pct,
            "trace": [{"id": p, "dist": d} for p, d in self.trace],
            "shells": dict(sorted(self.shells.items())),
        }
        if self.group is not None:
            payload["group"] = self.group
        return payload


@dataclass(frozen=True)
class SeedReport:
    """All per-gang seed sets plus optional group-level aggregation."""

    entries: tuple[GangSeeds, ...]
    skipped: tuple[str, ...] = ()
    group_means: dict[str, float] = field(default_factory=dict)

    def group_gap(self) -> float | None:
        """Signed mean difference, last minus first group in name order."""
        if len(self.group_means) != 2:
            return None
        (_, lo), (_, hi) = sorted(self.group_means.items())
        return hi - lo

    def to_json_dict(self) -> dict:
        payload: dict = {
            "gangs": [e.to_json_dict() for e in self.entries],
            "skipped": list(self.skipped),
        }
        if self.group_means:
            payload["group_means"] = dict(sorted(self.group_means.items()))
            payload["group_gap"] = self.group_gap()
        return payload


def seed_set_report(
    net: CoArrestNetwork,
    gangs: Iterable[str] | None = None,
    tags: Mapping[str, str] | None = None,
) -> SeedReport:
    """Decompose every gang's admitted-member subgraph and compare sizes.

    Reports |seed| / |admitted members| as a percentage per gang. Gangs with
    no admitted members are skipped with a warning. When tags assign gangs
    to groups (e.g. organizational styles), per-group mean percentages are
    aggregated as well.
    """
    entries = []
    skipped = []
    for gang in sorted(gangs) if gangs is not None else net.gangs():
        members = net.members(gang)
        if not members:
            log.warning("gang %s has no admitted members, skipping", gang)
            skipped.append(gang)
            continue
        sub = induced_subgraph(net, members)
        result = find_seed_set(sub)
        entries.append(
            GangSeeds(
                gang=gang,
                members=len(members),
                seed=result.seed,
                seed_pct=100.0 * len(result.seed) / len(members),
                trace=result.trace,
                shells=shell_numbers(sub),
                group=tags.get(gang) if tags else None,
            )
        )
    group_means: dict[str, float] = {}
    if tags:
        by_group: dict[str, list[float]] = {}
        for e in entries:
            if e.group is not None:
                by_group.setdefault(e.group, []).append(e.seed_pct)
        group_means = {g: fmean(v) for g, v in sorted(by_group.items())}
    return SeedReport(tuple(entries), tuple(skipped), group_means)
