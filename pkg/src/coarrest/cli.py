"""Command-line pipeline: gen, ingest, analyze, report.

Stage outputs persist as JSON between subcommands so each step is
re-runnable and diffable. Exit codes: 0 success, 1 analysis infeasibility,
2 input or schema error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from . import __version__
from .community import Ecosystem, build_ecosystem, find_connectors, louvain
from .graph import CoArrestNetwork, build_network, induced_subgraph
from .ingest import (
    IngestError,
    ParseSummary,
    derive_coarrest_edges,
    merge_edges,
    parse_arrests,
    parse_relationships,
    relationship_edges,
)
from .kernels import BACKEND
from .membership import (
    DEFAULT_BINS,
    infer_membership,
    learn_influence,
    membership_histogram,
)
from .report import (
    DEFAULT_STRENGTH_BANDS,
    AnalysisReport,
    assemble,
    chart_data,
    render_dot,
    render_markdown,
)
from .synth import SynthConfig, generate
from .tipping import seed_set_report

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ANALYSIS = 1
EXIT_INPUT = 2


class InputError(Exception):
    """Bad inputs or flags; maps to exit code 2."""


# -- small helpers ------------------------------------------------------------


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _write_csv(path: Path, rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _read_bytes(path: str) -> bytes:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"no such file: {path}")
    return p.read_bytes()


def _parse_range(text: str, flag: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError as exc:
        raise InputError(f"{flag} expects LO:HI, got {text!r}") from exc


def _parse_floats(text: str, flag: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise InputError(f"{flag} expects comma-separated numbers, got {text!r}") from exc


def _read_config_file(path: str) -> dict[str, str]:
    """key=value lines; blank lines and # comments ignored."""
    out: dict[str, str] = {}
    for ln, raw in enumerate(_read_bytes(path).decode("utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"{path}:{ln}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _resolve(args: argparse.Namespace, defaults: dict[str, tuple[Callable, object]]) -> None:
    """Fill unset options from the config file, then hard defaults.

    Command-line flags always win; the config file supplies values only for
    options the user did not pass.
    """
    config = _read_config_file(args.config) if getattr(args, "config", None) else {}
    unknown = set(config) - set(defaults)
    if unknown:
        raise InputError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    for dest, (coerce, default) in defaults.items():
        if getattr(args, dest, None) is None:
            if dest in config:
                try:
                    setattr(args, dest, coerce(config[dest]))
                except ValueError as exc:
                    raise InputError(f"config key {dest}: {exc}") from exc
            else:
                setattr(args, dest, default)


def _per_gang(fn: Callable[[str], object], gangs: list[str], jobs: int) -> dict:
    if jobs <= 1 or len(gangs) <= 1:
        return {g: fn(g) for g in gangs}
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return dict(zip(gangs, pool.map(fn, gangs)))


def _load_network(path: str) -> CoArrestNetwork:
    try:
        payload = json.loads(_read_bytes(path).decode("utf-8"))
        return CoArrestNetwork.from_json_dict(payload)
    except (json.JSONDecodeError, ValueError) as exc:
        raise InputError(f"{path}: not a valid network file: {exc}") from exc


def _load_tags(path: str) -> dict[str, str]:
    try:
        payload = json.loads(_read_bytes(path).decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON: {exc}") from exc
    if isinstance(payload, dict) and isinstance(payload.get("gangs"), dict):
        out = {}
        for gang, info in payload["gangs"].items():
            if isinstance(info, dict) and "style" in info:
                out[gang] = str(info["style"])
        if out:
            return out
    if isinstance(payload, dict) and all(isinstance(v, str) for v in payload.values()):
        return dict(payload)
    raise InputError(f"{path}: expected gang->tag mapping or truth file with styles")


# -- ingest -------------------------------------------------------------------


def _ingest_tables(
    arrests_path: str | None, relationships_path: str | None
) -> tuple[CoArrestNetwork, dict]:
    arrests = []
    summaries: dict[str, dict] = {}
    extra_edges = None
    if arrests_path:
        raw = _read_bytes(arrests_path)
        if not raw.strip():
            log.warning("%s is empty; continuing with no arrest records", arrests_path)
            summaries["arrests"] = ParseSummary(warnings=["empty input file"]).to_json_dict()
        else:
            arrests, summary = parse_arrests(raw)
            summaries["arrests"] = summary.to_json_dict()
    if relationships_path:
        raw = _read_bytes(relationships_path)
        if not raw.strip():
            log.warning(
                "%s is empty; continuing with no relationship records", relationships_path
            )
            summaries["relationships"] = ParseSummary(
                warnings=["empty input file"]
            ).to_json_dict()
        else:
            records, summary = parse_relationships(raw)
            summaries["relationships"] = summary.to_json_dict()
            extra_edges = relationship_edges(records)
    net = build_network(arrests, extra_edges)
    derived = derive_coarrest_edges(arrests)
    summaries["network"] = {
        "nodes": net.node_count,
        "edges": net.edge_count,
        "total_weight": net.total_weight,
        "derived_edge_occurrences": sum(w for _, _, w in derived),
        "relationship_edge_occurrences": (
            sum(w for _, _, w in extra_edges) if extra_edges else 0
        ),
    }
    return net, summaries


def cmd_ingest(args: argparse.Namespace) -> int:
    if not args.arrests and not args.relationships:
        raise InputError("provide --arrests and/or --relationships")
    out = Path(args.out)
    net, summaries = _ingest_tables(args.arrests, args.relationships)
    _write(out / "network.json", net.to_json())
    _write(out / "ingest_summary.json", _dump_json(summaries))
    print(
        f"ingested {net.node_count} persons, {net.edge_count} ties "
        f"(total weight {net.total_weight}) -> {out / 'network.json'}"
    )
    return EXIT_OK


# -- gen ----------------------------------------------------------------------

GEN_DEFAULTS: dict[str, tuple[Callable, object]] = {
    "gangs": (int, 18),
    "seed": (int, 0),
    "members": (str, "60:80"),
    "cells": (str, "4:6"),
    "hubs": (int, 3),
    "styles": (str, None),
    "density": (float, 0.6),
    "cross_subgroup": (float, 0.06),
    "cross_gang": (float, 0.03),
    "dual_claim": (float, 0.012),
    "disclosure": (float, 0.85),
}


def cmd_gen(args: argparse.Namespace) -> int:
    _resolve(args, GEN_DEFAULTS)
    members = _parse_range(args.members, "--members")
    cells = _parse_range(args.cells, "--cells")
    styles = None
    if args.styles:
        styles = tuple(s.strip() for s in args.styles.split(",") if s.strip())
    config = SynthConfig(
        gangs=args.gangs,
        members_low=members[0],
        members_high=members[1],
        styles=styles,
        intra_density=args.density,
        cell_low=cells[0],
        cell_high=cells[1],
        hub_count=args.hubs,
        cross_subgroup_rate=args.cross_subgroup,
        cross_gang_rate=args.cross_gang,
        dual_claim_rate=args.dual_claim,
        disclosure=args.disclosure,
        seed=args.seed,
    )
    result = generate(config)
    out = Path(args.out)
    _write(out / "arrests.csv", result.arrests_csv)
    _write(out / "relationships.csv", result.relationships_csv)
    _write(out / "truth.json", _dump_json(result.truth))
    n_persons = len(result.truth["persons"])
    print(f"generated {n_persons} persons across {config.gangs} gangs -> {out}")
    return EXIT_OK


# -- analyze ------------------------------------------------------------------

ANALYZE_DEFAULTS: dict[str, tuple[Callable, object]] = {
    "tau": (float, None),
    "bins": (str, ",".join(str(b) for b in DEFAULT_BINS)),
    "connector_threshold": (int, 2),
    "strength_bands": (str, ",".join(str(b) for b in DEFAULT_STRENGTH_BANDS)),
    "jobs": (int, 1),
}


def cmd_analyze(args: argparse.Namespace) -> int:
    _resolve(args, ANALYZE_DEFAULTS)
    out = Path(args.out)
    bins = _parse_floats(args.bins, "--bins")
    bands_f = _parse_floats(args.strength_bands, "--strength-bands")
    if len(bands_f) != 2 or bands_f[0] >= bands_f[1]:
        raise InputError("--strength-bands expects two ascending numbers")
    bands = (int(bands_f[0]), int(bands_f[1]))
    if args.connector_threshold < 1:
        raise InputError("--connector-threshold must be at least 1")

    timings: dict[str, float] = {}
    t_total = time.perf_counter()
    inputs: dict[str, str] = {}

    t = time.perf_counter()
    if args.from_csv:
        if not args.arrests and not args.relationships:
            raise InputError("--from-csv requires --arrests and/or --relationships")
        for path in (args.arrests, args.relationships):
            if path:
                inputs[path] = _sha256(path)
        net, summaries = _ingest_tables(args.arrests, args.relationships)
        _write(out / "network.json", net.to_json())
        _write(out / "ingest_summary.json", _dump_json(summaries))
    else:
        if not args.network:
            raise InputError("provide --network FILE or --from-csv with CSV paths")
        inputs[args.network] = _sha256(args.network)
        net = _load_network(args.network)
    timings["load"] = time.perf_counter() - t

    gangs = net.gangs()
    if args.gangs:
        wanted = sorted({g.strip() for g in args.gangs.split(",") if g.strip()})
        unknown = [g for g in wanted if g not in gangs]
        if unknown:
            raise InputError(f"unknown gang(s): {', '.join(unknown)}")
        gangs = wanted
    tags = _load_tags(args.tags) if args.tags else None

    t = time.perf_counter()
    influences = _per_gang(lambda g: learn_influence(net, g), gangs, args.jobs)
    timings["influence"] = time.perf_counter() - t

    t = time.perf_counter()
    state = infer_membership(net, influences, gangs=gangs)
    histogram = membership_histogram(state, bins)
    timings["membership"] = time.perf_counter() - t

    t = time.perf_counter()
    seeds = seed_set_report(net, gangs=gangs, tags=tags)
    timings["seeds"] = time.perf_counter() - t

    def partition_gang(gang: str):
        members = set(net.members(gang))
        if args.tau is not None:
            for person, values in state.inferred.items():
                if values.get(gang, 0.0) >= args.tau:
                    members.add(person)
        sub = induced_subgraph(net, members)
        if sub.total_weight == 0:
            return None
        return louvain(sub)

    t = time.perf_counter()
    partitions = _per_gang(partition_gang, gangs, args.jobs)
    timings["partitions"] = time.perf_counter() - t

    t = time.perf_counter()
    partitioned = {g: p for g, p in partitions.items() if p is not None}
    connectors = find_connectors(net, partitioned, args.connector_threshold)
    ecosystems = [
        build_ecosystem(net, partitioned, g, args.connector_threshold, connectors)
        for g in sorted(partitioned)
    ]
    timings["ecosystems"] = time.perf_counter() - t

    meta = {
        "tool": "coarrest",
        "version": __version__,
        "backend": BACKEND,
        "inputs": inputs,
        "config": {
            "tau": args.tau,
            "bins": list(bins),
            "connector_threshold": args.connector_threshold,
            "strength_bands": list(bands),
            "jobs": args.jobs,
            "gangs": gangs,
            "tags": args.tags,
        },
    }
    report = assemble(
        net,
        influences=influences,
        state=state,
        histogram=histogram,
        seeds=seeds,
        partitions=partitions,
        ecosystems=ecosystems,
        connectors=connectors,
        meta=meta,
    )

    t = time.perf_counter()
    _write(out / "report.json", _dump_json(report.to_json_dict()))
    _write(out / "report.md", render_markdown(report))
    for figure, rows in chart_data(report).items():
        _write_csv(out / "figures" / f"{figure}.csv", rows)
    _write(out / "graphs" / "network.dot", render_dot(net))
    for eco in ecosystems:
        _write(out / "graphs" / f"ecosystem_{eco.focal}.dot", render_dot(eco))
    timings["render"] = time.perf_counter() - t
    timings["total"] = time.perf_counter() - t_total

    _write(
        out / "timings.json",
        _dump_json(
            {
                "backend": BACKEND,
                "generated_at": datetime.now(timezone.utc).isoformat(),
                "seconds": {k: round(v, 6) for k, v in timings.items()},
            }
        ),
    )
    print(
        f"analyzed {net.node_count} persons / {len(gangs)} gangs in "
        f"{timings['total']:.2f}s ({BACKEND} backend) -> {out / 'report.json'}"
    )
    return EXIT_OK


# -- report -------------------------------------------------------------------


def cmd_report(args: argparse.Namespace) -> int:
    try:
        payload = json.loads(_read_bytes(args.report).decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.report}: not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise InputError(f"{args.report}: expected a report object")
    report = AnalysisReport.from_json_dict(payload)
    out = Path(args.out)
    _write(out / "report.md", render_markdown(report))
    for figure, rows in chart_data(report).items():
        _write_csv(out / "figures" / f"{figure}.csv", rows)
    for eco_payload in report.ecosystems:
        eco = Ecosystem.from_json_dict(eco_payload)
        _write(out / "graphs" / f"ecosystem_{eco.focal}.dot", render_dot(eco))
    if args.network:
        net = _load_network(args.network)
        _write(out / "graphs" / "network.dot", render_dot(net))
    print(f"rendered report artifacts -> {out}")
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coarrest",
        description="Co-arrest network analysis: membership inference, "
        "tipping-model seed sets, and sub-group ecosystems.",
    )
    parser.add_argument("--version", action="version", version=f"coarrest {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic arrest dataset")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--gangs", type=int, help="number of gangs (default 18)")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--members", help="members per gang as LO:HI (default 60:80)")
    p.add_argument("--cells", help="cell size range as LO:HI (default 4:6)")
    p.add_argument("--hubs", type=int, help="hubs per centralized subgroup (default 3)")
    p.add_argument("--styles", help="comma list: centralized|decentralized per gang")
    p.add_argument("--density", type=float, help="within-cell pair density (default 0.6)")
    p.add_argument("--cross-subgroup", type=float, dest="cross_subgroup",
                   help="bridge events per member within a gang (default 0.06)")
    p.add_argument("--cross-gang", type=float, dest="cross_gang",
                   help="bridge events per member across gangs (default 0.03)")
    p.add_argument("--dual-claim", type=float, dest="dual_claim",
                   help="probability of claiming a second gang (default 0.012)")
    p.add_argument("--disclosure", type=float,
                   help="fraction of members who admit membership (default 0.85)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("ingest", help="parse CSV tables into a network file")
    p.add_argument("--arrests", help="arrests.csv path")
    p.add_argument("--relationships", help="relationships.csv path")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("analyze", help="run the full analysis pipeline")
    p.add_argument("--network", help="network.json produced by ingest")
    p.add_argument("--from-csv", action="store_true",
                   help="ingest --arrests/--relationships first, then analyze")
    p.add_argument("--arrests", help="arrests.csv (with --from-csv)")
    p.add_argument("--relationships", help="relationships.csv (with --from-csv)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--tau", type=float,
                   help="confidence threshold for community inclusion "
                   "(default: admitted members only)")
    p.add_argument("--bins", help="histogram bin edges, comma separated")
    p.add_argument("--connector-threshold", type=int, dest="connector_threshold",
                   help="subgroups touched to count as a connector (default 2)")
    p.add_argument("--strength-bands", dest="strength_bands",
                   help="tie counts ending the weak and moderate bands (default 2,5)")
    p.add_argument("--jobs", type=int, help="parallel workers for per-gang stages")
    p.add_argument("--gangs", help="restrict analysis to a comma list of gangs")
    p.add_argument("--tags", help="JSON file tagging gangs with group labels")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("report", help="re-render artifacts from report.json")
    p.add_argument("--report", required=True, help="report.json path")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--network", help="optional network.json to render as DOT")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if not logging.getLogger().handlers:
        logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InputError, IngestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError) as exc:
        print(f"analysis error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
