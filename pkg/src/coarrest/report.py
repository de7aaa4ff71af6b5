"""Report assembly and rendering.

The JSON report is the single source of truth; Markdown, DOT, and chart
series are deterministic views over it. Nothing here computes analysis
results, it only arranges what the analysis modules produced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .community import Connector, Ecosystem, Partition
from .graph import CoArrestNetwork, connected_components
from .membership import InfluenceFunction, MembershipHistogram, MembershipState
from .tipping import SeedReport

DEFAULT_STRENGTH_BANDS = (2, 5)  # ties <= 2 weak, <= 5 moderate, else strong

_PALETTE = (
    "#66c2a5", "#fc8d62", "#8da0cb", "#e78ac3", "#a6d854", "#ffd92f",
    "#e5c494", "#b3b3b3", "#1b9e77", "#d95f02", "#7570b3", "#e7298a",
    "#66a61e", "#e6ab02", "#a6761d", "#666666", "#a6cee3", "#fb9a99",
)


@dataclass
class AnalysisReport:
    """Full machine-readable analysis output, JSON-shaped throughout.

    Every field is a plain dict/list tree so a JSON round trip reproduces
    the object exactly. Volatile run metadata (timestamps, wall-clock) is
    deliberately kept out; it belongs in the timings sidecar.
    """

    meta: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    influence: list = field(default_factory=list)
    membership: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    partitions: dict = field(default_factory=dict)
    ecosystems: list = field(default_factory=list)
    connectors: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "meta": self.meta,
            "summary": self.summary,
            "influence": self.influence,
            "membership": self.membership,
            "seeds": self.seeds,
            "partitions": self.partitions,
            "ecosystems": self.ecosystems,
            "connectors": self.connectors,
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "AnalysisReport":
        return cls(
            meta=payload.get("meta", {}),
            summary=payload.get("summary", {}),
            influence=payload.get("influence", []),
            membership=payload.get("membership", {}),
            seeds=payload.get("seeds", {}),
            partitions=payload.get("partitions", {}),
            ecosystems=payload.get("ecosystems", []),
            connectors=payload.get("connectors", []),
        )


def assemble(
    net: CoArrestNetwork,
    influences: Mapping[str, InfluenceFunction],
    state: MembershipState,
    histogram: MembershipHistogram,
    seeds: SeedReport,
    partitions: Mapping[str, Partition | None],
    ecosystems: Iterable[Ecosystem],
    connectors: Iterable[Connector],
    meta: dict | None = None,
) -> AnalysisReport:
    """Bind completed analysis outputs into one report object."""
    inferred_persons = len(state.inferred)
    above_half = sum(
        1 for vals in state.inferred.values() if max(vals.values()) > 0.5
    )
    partition_payload = {}
    for gang in sorted(partitions):
        part = partitions[gang]
        if part is None:
            partition_payload[gang] = {
                "communities": [[p] for p in sorted(net.members(gang))],
                "modularity": None,
                "note": "no internal ties; singleton subgroups",
            }
        else:
            partition_payload[gang] = part.to_json_dict()
    return AnalysisReport(
        meta=dict(meta or {}),
        summary={
            "nodes": net.node_count,
            "edges": net.edge_count,
            "total_weight": net.total_weight,
            "gangs": len(net.gangs()),
            "components": len(connected_components(net)),
            "admitted_persons": int(net.any_admitted_mask().sum()),
            "unadmitted_persons": int((~net.any_admitted_mask()).sum()),
        },
        influence=[influences[g].to_json_dict() for g in sorted(influences)],
        membership={
            "state": state.to_json_dict(),
            "histogram": histogram.to_json_dict(),
            "inferred_assignments": state.assignment_count(),
            "inferred_persons": inferred_persons,
            "persons_above_half": above_half,
        },
        seeds=seeds.to_json_dict(),
        partitions=partition_payload,
        ecosystems=[e.to_json_dict() for e in ecosystems],
        connectors=[c.to_json_dict() for c in connectors],
    )


def _strength(ties: int, bands: tuple[int, int]) -> str:
    weak, moderate = bands
    if ties <= weak:
        return "weak"
    if ties <= moderate:
        return "moderate"
    return "strong"


def render_markdown(report: AnalysisReport) -> str:
    """Deterministic Markdown view of the report."""
    bands = tuple(report.meta.get("config", {}).get("strength_bands", DEFAULT_STRENGTH_BANDS))
    s = report.summary
    lines = ["# Co-arrest network analysis", ""]
    lines += [
        f"- Persons: {s.get('nodes', 0)}",
        f"- Co-arrest ties: {s.get('edges', 0)} (total weight {s.get('total_weight', 0)})",
        f"- Gangs: {s.get('gangs', 0)}",
        f"- Connected components: {s.get('components', 0)}",
        f"- Admitted persons: {s.get('admitted_persons', 0)}; "
        f"unadmitted: {s.get('unadmitted_persons', 0)}",
        "",
    ]
    if not s.get("nodes"):
        return "\n".join(lines).rstrip() + "\n"

    mem = report.membership
    lines += ["## Membership inference", ""]
    lines += [
        f"- Inferred assignments: {mem.get('inferred_assignments', 0)} "
        f"across {mem.get('inferred_persons', 0)} persons",
        f"- Persons with confidence above 0.5 for at least one gang: "
        f"{mem.get('persons_above_half', 0)}",
        "",
    ]
    hist = mem.get("histogram")
    if hist and (any(hist["assignments"]) or any(hist["persons"])):
        lines += [
            "| Confidence | Assignments | Persons (max over gangs) |",
            "| --- | ---: | ---: |",
        ]
        edges = hist["edges"]
        for i, (a, p) in enumerate(zip(hist["assignments"], hist["persons"])):
            lines.append(f"| ({edges[i]:g}, {edges[i + 1]:g}] | {a} | {p} |")
        lines.append("")
    if report.influence:
        lines += ["Influence functions (levels where the value steps up):", ""]
        for fn in report.influence:
            steps = []
            prev = 0.0
            for i, r in enumerate(fn["R"], start=1):
                if r > prev:
                    steps.append(f"R({i})={r:.4f}")
                    prev = r
            detail = ", ".join(steps) if steps else "identically zero"
            suffix = " [no admitted members]" if fn.get("degenerate") else ""
            lines.append(f"- {fn['gang']}: {detail}{suffix}")
        lines.append("")

    seeds = report.seeds
    if seeds:
        lines += ["## Seed sets (tipping model)", ""]
        lines += [
            "| Gang | Group | Members | Seed size | Seed % |",
            "| --- | --- | ---: | ---: | ---: |",
        ]
        for e in seeds.get("gangs", []):
            group = e.get("group") or "-"
            lines.append(
                f"| {e['gang']} | {group} | {e['members']} | "
                f"{len(e['seed'])} | {e['seed_pct']:.1f} |"
            )
        lines.append("")
        for e in seeds.get("gangs", []):
            if not e["seed"]:
                lines.append(
                    f"- {e['gang']}: empty seed set; every member tips "
                    f"without seeding (isolated or self-starting members)."
                )
        if seeds.get("skipped"):
            lines.append(
                "- Skipped (no admitted members): " + ", ".join(seeds["skipped"])
            )
        if seeds.get("group_means"):
            means = ", ".join(
                f"{g}: {v:.2f}%" for g, v in sorted(seeds["group_means"].items())
            )
            lines.append(f"- Group mean seed sizes: {means}")
            if seeds.get("group_gap") is not None:
                lines.append(f"- Group gap (last minus first): {seeds['group_gap']:.2f}%")
        lines.append("")

    if report.partitions:
        lines += ["## Sub-groups (modularity partitions)", ""]
        lines += [
            "| Gang | Members | Subgroups | Sizes | Modularity |",
            "| --- | ---: | ---: | --- | ---: |",
        ]
        for gang in sorted(report.partitions):
            part = report.partitions[gang]
            comms = part["communities"]
            members = sum(len(c) for c in comms)
            sizes = ", ".join(str(len(c)) for c in comms)
            mod = part["modularity"]
            mod_text = f"{mod:.4f}" if mod is not None else "n/a"
            lines.append(
                f"| {gang} | {members} | {len(comms)} | {sizes} | {mod_text} |"
            )
        lines.append("")
        for gang in sorted(report.partitions):
            note = report.partitions[gang].get("note")
            if note:
                lines.append(f"- {gang}: {note}")
        if any(report.partitions[g].get("note") for g in report.partitions):
            lines.append("")

    if report.ecosystems:
        lines += ["## Ecosystems", ""]
        for eco in report.ecosystems:
            lines.append(f"### {eco['focal']}")
            lines.append("")
            own = [n for n in eco["nodes"] if n["gang"] == eco["focal"]]
            foreign = [n for n in eco["nodes"] if n["gang"] != eco["focal"]]
            lines.append(
                "- Subgroups: "
                + (", ".join(f"{n['id']} ({n['size']})" for n in own) or "none")
            )
            if foreign:
                lines.append(
                    "- Adjacent foreign subgroups: "
                    + ", ".join(f"{n['id']} ({n['size']})" for n in foreign)
                )
            for e in eco["edges"]:
                kind = e["provenance"].replace("_", " ")
                lines.append(
                    f"- {e['a']} -- {e['b']}: {_strength(e['weight'], bands)} "
                    f"({e['weight']} ties, co-arrest weight {e['coarrest_weight']}; {kind})"
                )
            if eco["connectors"]:
                names = ", ".join(c["person"] for c in eco["connectors"])
                lines.append(f"- Connectors involved: {names}")
            lines.append("")

    if report.connectors:
        lines += ["## Connectors", ""]
        lines += ["| Person | Subgroups | Touched |", "| --- | ---: | --- |"]
        for c in report.connectors:
            lines.append(
                f"| {c['person']} | {len(c['touched'])} | {', '.join(c['touched'])} |"
            )
        lines.append("")

    return "\n".join(lines).rstrip() + "\n"


def _gang_colors(gangs: Iterable[str]) -> dict[str, str]:
    return {
        g: _PALETTE[i % len(_PALETTE)] for i, g in enumerate(sorted(set(gangs)))
    }


def render_dot(obj, name: str | None = None) -> str:
    """Render a network or an ecosystem as DOT, byte-stable.

    Person graphs color nodes by their first admitted gang; ecosystem graphs
    color subgroups by parent gang and draw shared-member ties dashed. Edge
    penwidth grows with weight.
    """
    if isinstance(obj, CoArrestNetwork):
        return _network_dot(obj, name or "coarrest")
    if isinstance(obj, Ecosystem):
        return _ecosystem_dot(obj, name)
    raise TypeError(f"cannot render {type(obj).__name__} as DOT")


def _penwidth(weight: int) -> str:
    return f"{min(1.0 + 0.5 * (weight - 1), 6.0):.2f}"


def _network_dot(net: CoArrestNetwork, name: str) -> str:
    colors = _gang_colors(net.gangs())
    out = [f'graph "{name}" {{']
    out.append("  node [shape=circle style=filled fillcolor=\"#dddddd\" fontsize=8];")
    for nd in net.nodes:
        if nd.admitted_gangs:
            color = colors[nd.admitted_gangs[0]]
            out.append(f'  "{nd.id}" [fillcolor="{color}"];')
        else:
            out.append(f'  "{nd.id}";')
    for a, b, w in net.edge_list():
        out.append(f'  "{a}" -- "{b}" [penwidth={_penwidth(w)}];')
    out.append("}")
    return "\n".join(out) + "\n"


def _ecosystem_dot(eco: Ecosystem, name: str | None) -> str:
    colors = _gang_colors(n.gang for n in eco.nodes)
    styles = {"social": "solid", "shared_member": "dashed", "both": "bold"}
    out = [f'graph "{name or "ecosystem_" + eco.focal}" {{']
    out.append('  node [shape=box style="rounded,filled" fontsize=10];')
    for n in eco.nodes:
        out.append(f'  "{n.id}" [label="{n.id} ({n.size})" fillcolor="{colors[n.gang]}"];')
    for e in eco.edges:
        out.append(
            f'  "{e.a}" -- "{e.b}" [label="{e.weight}" '
            f"penwidth={_penwidth(e.weight)} style={styles[e.provenance]}];"
        )
    out.append("}")
    return "\n".join(out) + "\n"


def chart_data(report: AnalysisReport) -> dict[str, list[list]]:
    """Tabular series for each figure analog; first row is the header."""
    influence = [["gang", "i", "R"]]
    for fn in report.influence:
        for i, r in enumerate(fn["R"], start=1):
            influence.append([fn["gang"], i, r])

    histogram = [["bin_low", "bin_high", "assignments", "persons"]]
    hist = report.membership.get("histogram")
    if hist:
        edges = hist["edges"]
        for i, (a, p) in enumerate(zip(hist["assignments"], hist["persons"])):
            histogram.append([edges[i], edges[i + 1], a, p])

    seed_pct = [["gang", "group", "seed_pct"]]
    for e in report.seeds.get("gangs", []):
        seed_pct.append([e["gang"], e.get("group") or "", e["seed_pct"]])

    mod_rows = [["gang", "modularity"]]
    for gang in sorted(report.partitions):
        m = report.partitions[gang]["modularity"]
        mod_rows.append([gang, "" if m is None else m])

    return {
        "influence": influence,
        "membership_histogram": histogram,
        "seed_pct": seed_pct,
        "modularity": mod_rows,
    }
