"""Synthetic arrest datasets with controllable organizational style.

Generates gangs as either a centralized structure (two hub-dominated
subgroups, most arrests pair followers with hubs) or a decentralized one
(many small dense cells). Arrest events are sampled as 2-4 person cliques,
so deriving co-arrest edges from the output reproduces realistic weighted
networks. Ground truth (styles, cells, undisclosed members) is returned
separately for evaluation; a fixed seed fully determines every byte.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field, asdict
from datetime import date, timedelta

CENTRALIZED = "centralized"
DECENTRALIZED = "decentralized"


@dataclass(frozen=True)
class SynthConfig:
    gangs: int = 18
    members_low: int = 60
    members_high: int = 80
    styles: tuple[str, ...] | None = None  # default: first half centralized
    intra_density: float = 0.6  # fraction of within-cell pairs realized
    cell_low: int = 4
    cell_high: int = 6
    hub_count: int = 3
    cross_subgroup_rate: float = 0.06  # bridge events per member, within gang
    cross_gang_rate: float = 0.03  # bridge events per member, across gangs
    dual_claim_rate: float = 0.012
    disclosure: float = 0.85
    seed: int = 0

    def __post_init__(self):
        if self.gangs < 1:
            raise ValueError("need at least one gang")
        if not 1 <= self.members_low <= self.members_high:
            raise ValueError("bad members range")
        if not 2 <= self.cell_low <= self.cell_high:
            raise ValueError("bad cell size range")
        if self.hub_count < 1:
            raise ValueError("need at least one hub")
        if self.intra_density > 1.0:
            raise ValueError("infeasible config: intra_density exceeds 1")
        if self.intra_density <= 0.0:
            raise ValueError("intra_density must be positive")
        for name in ("cross_subgroup_rate", "cross_gang_rate", "dual_claim_rate", "disclosure"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be within [0, 1]")
        if self.styles is not None:
            if len(self.styles) != self.gangs:
                raise ValueError("styles must list one style per gang")
            bad = set(self.styles) - {CENTRALIZED, DECENTRALIZED}
            if bad:
                raise ValueError(f"unknown style(s): {sorted(bad)}")

    def resolved_styles(self) -> tuple[str, ...]:
        if self.styles is not None:
            return self.styles
        half = self.gangs // 2
        return tuple(
            CENTRALIZED if i < half else DECENTRALIZED for i in range(self.gangs)
        )


@dataclass(frozen=True)
class SynthResult:
    arrests_csv: str
    relationships_csv: str
    truth: dict


@dataclass
class _Builder:
    rng: random.Random
    events: list[list[str]] = field(default_factory=list)
    claims: dict[str, list[str]] = field(default_factory=dict)
    disclosed: dict[str, bool] = field(default_factory=dict)
    _person_seq: int = 0

    def new_person(self) -> str:
        self._person_seq += 1
        return f"P{self._person_seq:05d}"

    def event(self, persons: list[str]) -> None:
        self.events.append(persons)

    def pair(self, a: str, b: str) -> None:
        self.event([a, b])


def _build_cells(builder: _Builder, cfg: SynthConfig, style: str, size: int) -> list[list[str]]:
    members = [builder.new_person() for _ in range(size)]
    rng = builder.rng
    if style == DECENTRALIZED:
        cells: list[list[str]] = []
        i = 0
        while i < size:
            k = min(rng.randint(cfg.cell_low, cfg.cell_high), size - i)
            cells.append(members[i : i + k])
            i += k
        for cell in cells:
            for x in range(len(cell)):
                for y in range(x + 1, len(cell)):
                    if rng.random() < cfg.intra_density:
                        builder.pair(cell[x], cell[y])
            if len(cell) >= 3:  # one multi-person arrest per cell for texture
                builder.event(rng.sample(cell, 3))
        return cells

    half = size // 2
    cells = [members[:half], members[half:]]
    for cell in cells:
        # followers first so hubs carry the cell's latest ids
        n_hubs = min(cfg.hub_count, len(cell))
        followers = cell[: len(cell) - n_hubs]
        hubs = cell[len(cell) - n_hubs :]
        for x in range(len(hubs)):
            for y in range(x + 1, len(hubs)):
                builder.pair(hubs[x], hubs[y])
        for f in followers:
            picked = rng.sample(hubs, min(2, len(hubs)))
            builder.pair(f, picked[0])  # everyone reaches at least one hub
            for h in picked[1:]:
                if rng.random() < cfg.intra_density:
                    builder.pair(f, h)
        if len(followers) >= 2:
            builder.event([hubs[0], *rng.sample(followers, 2)])
    return cells


def generate(config: SynthConfig) -> SynthResult:
    """Produce arrests.csv / relationships.csv text plus ground truth."""
    rng = random.Random(config.seed)
    builder = _Builder(rng)
    styles = config.resolved_styles()

    gang_names = [f"G{i + 1:02d}" for i in range(config.gangs)]
    gang_members: dict[str, list[str]] = {}
    gang_cells: dict[str, list[list[str]]] = {}
    for gang, style in zip(gang_names, styles):
        size = rng.randint(config.members_low, config.members_high)
        cells = _build_cells(builder, config, style, size)
        gang_cells[gang] = cells
        gang_members[gang] = [p for cell in cells for p in cell]
        for p in gang_members[gang]:
            builder.claims[p] = [gang]
            builder.disclosed[p] = rng.random() < config.disclosure
        # sparse bridges between cells keep the gang loosely connected
        n_bridges = round(config.cross_subgroup_rate * size)
        for _ in range(n_bridges):
            if len(cells) < 2:
                break
            ca, cb = rng.sample(range(len(cells)), 2)
            builder.pair(rng.choice(cells[ca]), rng.choice(cells[cb]))

    total_members = sum(len(m) for m in gang_members.values())
    if config.gangs >= 2:
        for _ in range(round(config.cross_gang_rate * total_members)):
            ga, gb = rng.sample(gang_names, 2)
            builder.pair(rng.choice(gang_members[ga]), rng.choice(gang_members[gb]))

    # a few people claim a second gang and carry a tie into it
    for gang in gang_names:
        for p in gang_members[gang]:
            if config.gangs >= 2 and rng.random() < config.dual_claim_rate:
                other = rng.choice([g for g in gang_names if g != gang])
                builder.claims[p].append(other)
                builder.disclosed[p] = True
                builder.pair(p, rng.choice(gang_members[other]))

    # everyone must appear in the arrest table, co-arrested or not
    seen = {p for ev in builder.events for p in ev}
    solo = [p for g in gang_names for p in gang_members[g] if p not in seen]
    for p in solo:
        builder.event([p])

    base_date = date(2019, 1, 1)
    arrests_buf = io.StringIO()
    arrests = csv.writer(arrests_buf, lineterminator="\n")
    arrests.writerow(["arrest_id", "person_id", "gang_claim", "date"])
    relationships_buf = io.StringIO()
    relationships = csv.writer(relationships_buf, lineterminator="\n")
    relationships.writerow(["person_a", "person_b"])

    extra_claim_events: list[tuple[str, str]] = []  # (person, claimed gang)
    for p, gangs in builder.claims.items():
        if builder.disclosed[p]:
            for g in gangs[1:]:
                extra_claim_events.append((p, g))

    seq = 0
    for ev in builder.events:
        seq += 1
        arrest_id = f"A{seq:06d}"
        when = (base_date + timedelta(days=rng.randrange(3 * 365))).isoformat()
        for p in ev:
            claim = builder.claims[p][0] if builder.disclosed[p] else ""
            arrests.writerow([arrest_id, p, claim, when])
        for x in range(len(ev)):
            for y in range(x + 1, len(ev)):
                a, b = sorted((ev[x], ev[y]))
                relationships.writerow([a, b])
    for p, g in extra_claim_events:
        seq += 1
        when = (base_date + timedelta(days=rng.randrange(3 * 365))).isoformat()
        arrests.writerow([f"A{seq:06d}", p, g, when])

    truth = {
        "config": {**asdict(config), "styles": list(styles)},
        "gangs": {
            g: {
                "style": styles[i],
                "size": len(gang_members[g]),
                "cells": [list(c) for c in gang_cells[g]],
            }
            for i, g in enumerate(gang_names)
        },
        "persons": {
            p: {
                "gangs": list(builder.claims[p]),
                "disclosed": builder.disclosed[p],
            }
            for g in gang_names
            for p in gang_members[g]
        },
    }
    return SynthResult(arrests_buf.getvalue(), relationships_buf.getvalue(), truth)
