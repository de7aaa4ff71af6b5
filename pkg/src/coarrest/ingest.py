"""CSV ingestion for arrest and relationship tables.

Two input shapes are supported: an arrest table (one row per person per
arrest, from which co-arrest edges are derived) and an optional explicit
relationship table (one row per co-arrest pair occurrence). Both feed the
same weighted edge-list format consumed by :mod:`coarrest.graph`.
"""

from __future__ import annotations

import csv
import io
import logging
from collections import Counter
from dataclasses import dataclass, field
from datetime import date
from itertools import combinations
from pathlib import Path
from typing import Iterable

log = logging.getLogger(__name__)

ARREST_REQUIRED = ("arrest_id", "person_id")
RELATIONSHIP_REQUIRED = ("person_a", "person_b")


class IngestError(Exception):
    """Raised when an input table cannot be ingested."""


class SchemaError(IngestError):
    """A required column is missing from the CSV header."""


class CsvParseError(IngestError):
    """The CSV itself is malformed; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class CsvDialect:
    """Dialect knobs for the input tables (header row is always required)."""

    delimiter: str = ","
    quotechar: str = '"'


@dataclass(frozen=True)
class ArrestRecord:
    arrest_id: str
    person_id: str
    gang_claim: str | None = None
    date: str | None = None


@dataclass(frozen=True)
class RelationshipRecord:
    """A co-arrest pair, stored in canonical (sorted) order."""

    person_a: str
    person_b: str


@dataclass
class ParseSummary:
    """Row accounting for one parsed table."""

    rows_read: int = 0
    accepted: int = 0
    rejected: int = 0
    duplicates: int = 0
    warnings: list[str] = field(default_factory=list)

    def warn(self, message: str) -> None:
        self.warnings.append(message)
        log.warning("%s", message)

    def to_json_dict(self) -> dict:
        return {
            "rows_read": self.rows_read,
            "accepted": self.accepted,
            "rejected": self.rejected,
            "duplicates": self.duplicates,
            "warnings": list(self.warnings),
        }


def _as_text(source) -> io.StringIO:
    """Normalize path / bytes / file-like input to an in-memory text stream.

    A str with no newline is read as a path; one with newlines is CSV text.
    """
    if isinstance(source, str) and "\n" in source:
        data = source
    elif isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    elif isinstance(source, bytes):
        data = source
    elif hasattr(source, "read"):
        data = source.read()
    else:
        raise TypeError(f"unsupported CSV source type: {type(source)!r}")
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return io.StringIO(data, newline="")


def _reader(source, dialect: CsvDialect) -> csv.DictReader:
    return csv.DictReader(
        _as_text(source), delimiter=dialect.delimiter, quotechar=dialect.quotechar
    )


def _check_header(reader: csv.DictReader, required: tuple[str, ...]) -> None:
    header = reader.fieldnames
    if header is None:
        raise SchemaError(f"empty input: header row with columns {required} required")
    missing = [c for c in required if c not in header]
    if missing:
        raise SchemaError(f"missing required column(s): {', '.join(missing)}")


def _clean(value: str | None) -> str | None:
    if value is None:
        return None
    value = value.strip()
    return value or None


def parse_arrests(
    source, dialect: CsvDialect = CsvDialect()
) -> tuple[list[ArrestRecord], ParseSummary]:
    """Parse an arrest table into validated records.

    Rows missing arrest_id or person_id are rejected and counted. Duplicate
    (arrest_id, person_id) rows collapse into the first occurrence; a later
    duplicate carrying a gang claim fills an empty one, anything else is
    only counted. Blank gang claims mean "undisclosed" and stay None.
    """
    reader = _reader(source, dialect)
    _check_header(reader, ARREST_REQUIRED)
    summary = ParseSummary()
    seen: dict[tuple[str, str], int] = {}
    records: list[ArrestRecord] = []
    try:
        for row in reader:
            summary.rows_read += 1
            arrest_id = _clean(row.get("arrest_id"))
            person_id = _clean(row.get("person_id"))
            if not arrest_id or not person_id:
                summary.rejected += 1
                summary.warn(f"line {reader.line_num}: missing arrest_id or person_id")
                continue
            claim = _clean(row.get("gang_claim"))
            when = _clean(row.get("date"))
            if when is not None:
                try:
                    date.fromisoformat(when)
                except ValueError:
                    summary.warn(f"line {reader.line_num}: unparseable date {when!r}")
                    when = None
            key = (arrest_id, person_id)
            if key in seen:
                summary.duplicates += 1
                prev = records[seen[key]]
                if claim is not None and prev.gang_claim is None:
                    records[seen[key]] = ArrestRecord(arrest_id, person_id, claim, prev.date)
                elif claim is not None and claim != prev.gang_claim:
                    summary.warn(
                        f"line {reader.line_num}: conflicting gang claim for "
                        f"{person_id} in arrest {arrest_id}; keeping {prev.gang_claim!r}"
                    )
                continue
            seen[key] = len(records)
            records.append(ArrestRecord(arrest_id, person_id, claim, when))
    except csv.Error as exc:
        raise CsvParseError(str(exc), reader.line_num) from exc
    summary.accepted = len(records)
    return records, summary


def parse_relationships(
    source, dialect: CsvDialect = CsvDialect()
) -> tuple[list[RelationshipRecord], ParseSummary]:
    """Parse an explicit pair table; one record per valid row.

    Pairs are canonicalized (sorted endpoints); self-loop rows are rejected
    with a warning. Repeated rows are kept so that occurrence counts can
    accumulate into edge weights downstream (see :func:`relationship_edges`).
    """
    reader = _reader(source, dialect)
    _check_header(reader, RELATIONSHIP_REQUIRED)
    summary = ParseSummary()
    records: list[RelationshipRecord] = []
    try:
        for row in reader:
            summary.rows_read += 1
            a = _clean(row.get("person_a"))
            b = _clean(row.get("person_b"))
            if not a or not b:
                summary.rejected += 1
                summary.warn(f"line {reader.line_num}: missing person_a or person_b")
                continue
            if a == b:
                summary.rejected += 1
                summary.warn(f"line {reader.line_num}: self-loop for {a} rejected")
                continue
            if b < a:
                a, b = b, a
            records.append(RelationshipRecord(a, b))
    except csv.Error as exc:
        raise CsvParseError(str(exc), reader.line_num) from exc
    summary.accepted = len(records)
    return records, summary


def derive_coarrest_edges(
    arrests: Iterable[ArrestRecord],
) -> list[tuple[str, str, int]]:
    """Turn arrest rows into a weighted co-arrest edge list.

    Every unordered pair of distinct persons sharing an arrest_id yields one
    edge occurrence; occurrences of the same pair across arrests accumulate
    into the integer edge weight.
    """
    by_arrest: dict[str, set[str]] = {}
    for rec in arrests:
        by_arrest.setdefault(rec.arrest_id, set()).add(rec.person_id)
    counts: Counter[tuple[str, str]] = Counter()
    for persons in by_arrest.values():
        for a, b in combinations(sorted(persons), 2):
            counts[(a, b)] += 1
    return [(a, b, w) for (a, b), w in sorted(counts.items())]


def relationship_edges(
    records: Iterable[RelationshipRecord],
) -> list[tuple[str, str, int]]:
    """Aggregate canonical pair records into a weighted edge list."""
    counts: Counter[tuple[str, str]] = Counter()
    for rec in records:
        counts[(rec.person_a, rec.person_b)] += 1
    return [(a, b, w) for (a, b), w in sorted(counts.items())]


def merge_edges(
    *edge_lists: Iterable[tuple[str, str, int]],
) -> list[tuple[str, str, int]]:
    """Sum weights of the same canonical pair across several edge lists."""
    counts: Counter[tuple[str, str]] = Counter()
    for edges in edge_lists:
        for a, b, w in edges:
            if b < a:
                a, b = b, a
            counts[(a, b)] += w
    return [(a, b, w) for (a, b), w in sorted(counts.items())]
