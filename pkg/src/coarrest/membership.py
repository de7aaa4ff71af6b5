"""Degree-of-membership inference for undisclosed gang affiliation.

Per gang, a monotone influence function is learned from the people who admit
membership: it maps "number of admitted neighbours" to a confidence lower
bound. Unaffiliated people then receive, for each gang, the confidence the
learned function assigns to their admitted-neighbour count. People with any
admitted gang keep their confidence-1 facts and are never assigned inferred
values.
"""

from __future__ import annotations

import logging
import math
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .graph import CoArrestNetwork
from .kernels import count_marked_neighbors

log = logging.getLogger(__name__)

CONFIDENCE_Z = 1.96  # 95% lower bound on the group-rate estimate


@dataclass(frozen=True)
class InfluenceFunction:
    """Monotone map from admitted-neighbour count to confidence in [0, 1].

    ``values[i]`` holds R[i] for i in 0..d_star with R[0] = 0; evaluation
    saturates at d_star. ``support`` retains the (i, pos, tot) counts the
    estimate at each index was computed from. ``degenerate`` flags the
    all-zero function produced when the gang has no admitted members or the
    network has no edges.
    """

    gang: str
    values: tuple[float, ...]
    support: tuple[tuple[int, int, int], ...] = ()
    degenerate: bool = False

    @property
    def d_star(self) -> int:
        return len(self.values) - 1

    def __call__(self, x: int) -> float:
        if x <= 0 or self.d_star == 0:
            return 0.0
        return self.values[min(int(x), self.d_star)]

    def to_json_dict(self) -> dict:
        return {
            "gang": self.gang,
            "R": list(self.values[1:]),
            "support": [
                {"i": i, "pos": pos, "tot": tot} for i, pos, tot in self.support
            ],
            "degenerate": self.degenerate,
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "InfluenceFunction":
        return cls(
            gang=payload["gang"],
            values=(0.0, *(float(v) for v in payload["R"])),
            support=tuple(
                (int(s["i"]), int(s["pos"]), int(s["tot"]))
                for s in payload.get("support", [])
            ),
            degenerate=bool(payload.get("degenerate", False)),
        )


def learn_influence(
    net: CoArrestNetwork, gang: str, z: float = CONFIDENCE_Z
) -> InfluenceFunction:
    """Fit the influence function for one gang from admitted members.

    For each neighbour-count level i in 1..d_star, tot counts the people
    with at least i admitted-to-gang neighbours and pos counts how many of
    those are themselves admitted. The raw rate pos/tot is lowered by
    z standard errors, clamped to [0, 1], and forced monotone by carrying
    the running maximum. Levels with tot = 0 inherit the previous value.
    """
    if gang not in net.gangs():
        raise KeyError(f"unknown gang {gang!r}")
    d_star = int(net.degrees.max()) if net.node_count else 0
    if d_star == 0:
        log.warning("gang %s: network has no edges, influence function is zero", gang)
        return InfluenceFunction(gang, (0.0,), (), degenerate=True)

    admitted = net.admitted_mask(gang)
    degenerate = not bool(admitted.any())
    if degenerate:
        log.warning("gang %s: no admitted members, influence function is zero", gang)
    counts = count_marked_neighbors(net.indptr, net.indices, admitted)
    # counts[v] <= degree(v) <= d_star, so one histogram covers every level
    hist_all = np.bincount(counts, minlength=d_star + 1)
    hist_pos = np.bincount(counts[admitted], minlength=d_star + 1)
    tot_at_least = np.cumsum(hist_all[::-1])[::-1]
    pos_at_least = np.cumsum(hist_pos[::-1])[::-1]

    values = [0.0]
    support = []
    for i in range(1, d_star + 1):
        tot = int(tot_at_least[i])
        pos = int(pos_at_least[i])
        support.append((i, pos, tot))
        if tot == 0:
            values.append(values[i - 1])
            continue
        p = pos / tot
        ser = math.sqrt(p * (1.0 - p) / tot)
        lower = min(1.0, max(0.0, p - z * ser))
        values.append(max(values[i - 1], lower))
    return InfluenceFunction(gang, tuple(values), tuple(support), degenerate)


@dataclass
class MembershipState:
    """Confidence assignments: admitted facts plus inferred values.

    ``admitted`` maps a person to their claimed gangs (confidence exactly 1).
    ``inferred`` maps an unaffiliated person to {gang: confidence} and holds
    only strictly positive values; zeros are represented by absence. The two
    key sets are disjoint by construction.
    """

    admitted: dict[str, tuple[str, ...]] = field(default_factory=dict)
    inferred: dict[str, dict[str, float]] = field(default_factory=dict)

    def confidence(self, person: str, gang: str) -> float:
        if gang in self.admitted.get(person, ()):
            return 1.0
        return self.inferred.get(person, {}).get(gang, 0.0)

    def provenance(self, person: str, gang: str) -> str | None:
        if gang in self.admitted.get(person, ()):
            return "admitted"
        if gang in self.inferred.get(person, {}):
            return "inferred"
        return None

    def best_inferred(self, person: str) -> tuple[str, float] | None:
        """Highest-confidence inferred gang for a person, ties to first name."""
        values = self.inferred.get(person)
        if not values:
            return None
        gang = max(sorted(values), key=lambda g: values[g])
        return gang, values[gang]

    def assignment_count(self) -> int:
        return sum(len(v) for v in self.inferred.values())

    def to_json_dict(self) -> dict:
        return {
            "admitted": {p: list(gs) for p, gs in sorted(self.admitted.items())},
            "inferred": {
                p: {g: v for g, v in sorted(vals.items())}
                for p, vals in sorted(self.inferred.items())
            },
        }


def infer_membership(
    net: CoArrestNetwork,
    functions: Mapping[str, InfluenceFunction] | None = None,
    gangs: Iterable[str] | None = None,
) -> MembershipState:
    """Assign membership confidences across the whole network.

    Anyone claiming a gang keeps confidence-1 facts for every claimed gang
    and nothing else. Everyone else receives, per gang, the influence
    function of their admitted-neighbour count; zero results are dropped.
    One pass is the fixpoint because inferred values never feed back into
    neighbour counts. ``gangs`` restricts inference to a subset; admitted
    facts are always carried in full.
    """
    gangs = sorted(gangs) if gangs is not None else net.gangs()
    unknown = [g for g in gangs if g not in net.gangs()]
    if unknown:
        raise KeyError(f"unknown gang(s): {unknown}")
    if functions is None:
        functions = {g: learn_influence(net, g) for g in gangs}
    else:
        missing = [g for g in gangs if g not in functions]
        if missing:
            raise ValueError(f"no influence function for gang(s): {missing}")

    state = MembershipState()
    for nd in net.nodes:
        if nd.admitted:
            state.admitted[nd.id] = nd.admitted_gangs
    unadmitted = ~net.any_admitted_mask()
    for gang in gangs:
        curve = functions[gang]
        counts = count_marked_neighbors(net.indptr, net.indices, net.admitted_mask(gang))
        for i in np.flatnonzero(unadmitted & (counts > 0)):
            value = curve(int(counts[i]))
            if value > 0.0:
                state.inferred.setdefault(net.ids[i], {})[gang] = value
    # keep per-person gang maps in name order regardless of gang loop order
    state.inferred = {p: dict(sorted(v.items())) for p, v in sorted(state.inferred.items())}
    return state


@dataclass(frozen=True)
class MembershipHistogram:
    """Binned confidence tallies, counted two ways.

    ``assignments`` counts every (person, gang) inferred value once;
    ``persons`` counts each person once at their maximum confidence over
    gangs. Bin j covers (edges[j], edges[j+1]].
    """

    edges: tuple[float, ...]
    assignments: tuple[int, ...]
    persons: tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {
            "edges": list(self.edges),
            "assignments": list(self.assignments),
            "persons": list(self.persons),
        }


DEFAULT_BINS = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


def membership_histogram(
    state: MembershipState, bins: Iterable[float] = DEFAULT_BINS
) -> MembershipHistogram:
    """Histogram inferred confidences over half-open bins covering (0, 1]."""
    edges = tuple(float(b) for b in bins)
    if len(edges) < 2 or any(a >= b for a, b in zip(edges, edges[1:])):
        raise ValueError("bin edges must be strictly increasing")
    if edges[0] != 0.0 or edges[-1] != 1.0:
        raise ValueError("bin edges must run from 0.0 to 1.0 to cover (0, 1]")
    n_bins = len(edges) - 1
    assignments = [0] * n_bins
    persons = [0] * n_bins
    for values in state.inferred.values():
        for v in values.values():
            assignments[bisect_left(edges, v) - 1] += 1
        top = max(values.values())
        persons[bisect_left(edges, top) - 1] += 1
    return MembershipHistogram(edges, tuple(assignments), tuple(persons))
