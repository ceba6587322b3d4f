"""Grant record ingestion and the inclusion funnel.

Records arrive as CSV or JSONL files with the columns
``record_id,title,abstract,fiscal_year,amount,institute,activity_code,department``.
Filtering applies the inclusion stages in a fixed order and reports the
number of surviving records after each stage.
"""

from __future__ import annotations

import csv
import json
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

REQUIRED_COLUMNS = (
    "record_id",
    "title",
    "abstract",
    "fiscal_year",
    "amount",
    "institute",
    "activity_code",
    "department",
)


class SchemaError(ValueError):
    """A required column is missing from the input file."""


class RowError(ValueError):
    """A row holds a malformed or invariant-violating value."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class CorpusError(ValueError):
    """The record set violates a corpus-level invariant."""


@dataclass(frozen=True, slots=True)
class GrantRecord:
    """One funded award."""

    record_id: str
    title: str
    abstract: str
    fiscal_year: int
    amount: int
    institute: str
    activity_code: str
    department: str


@dataclass(frozen=True)
class FilterCriteria:
    """Inclusion funnel configuration.

    Empty ``institutes`` or ``activity_prefixes`` disable the respective
    stage (every record passes it).
    """

    min_tokens: int = 50
    institutes: frozenset[str] = frozenset({"CA"})
    activity_prefixes: frozenset[str] = frozenset({"R"})
    excluded_activities: frozenset[str] = frozenset({"R25"})
    year_range: tuple[int, int] = (2000, 2020)

    def __post_init__(self) -> None:
        if self.min_tokens < 1:
            raise ValueError(f"min_tokens must be >= 1, got {self.min_tokens}")
        start, end = self.year_range
        if start > end:
            raise ValueError(f"year_range start {start} exceeds end {end}")


@dataclass
class FunnelReport:
    """Ordered (stage name, surviving record count) pairs; counts never increase."""

    stages: list[tuple[str, int]] = field(default_factory=list)

    def counts(self) -> list[int]:
        return [c for _, c in self.stages]

    def final_count(self) -> int:
        return self.stages[-1][1] if self.stages else 0


def _coerce_record(raw: dict, line: int) -> GrantRecord:
    for col in REQUIRED_COLUMNS:
        if raw.get(col) is None:
            raise SchemaError(f"missing required column '{col}'")
    try:
        year = int(raw["fiscal_year"])
    except (TypeError, ValueError):
        raise RowError(f"malformed fiscal_year {raw['fiscal_year']!r}", line) from None
    try:
        amount = int(raw["amount"])
    except (TypeError, ValueError):
        raise RowError(f"malformed amount {raw['amount']!r}", line) from None
    if amount < 0:
        raise RowError(f"negative amount {amount}", line)
    return GrantRecord(
        record_id=str(raw["record_id"]),
        title=str(raw["title"]),
        abstract=str(raw["abstract"]),
        fiscal_year=year,
        amount=amount,
        institute=str(raw["institute"]),
        activity_code=str(raw["activity_code"]),
        department=str(raw["department"]),
    )


def load_records(path: str | Path, format: str = "csv") -> list[GrantRecord]:
    """Load grant records from a CSV or JSONL file, preserving row order."""
    path = Path(path)
    records: list[GrantRecord] = []
    if format == "csv":
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            for col in REQUIRED_COLUMNS:
                if col not in header:
                    raise SchemaError(f"missing required column '{col}'")
            for raw in reader:
                records.append(_coerce_record(raw, reader.line_num))
    elif format == "jsonl":
        with path.open(encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    raw = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise RowError(f"invalid JSON: {exc.msg}", line_no) from None
                if not isinstance(raw, dict):
                    raise RowError("expected a JSON object", line_no)
                records.append(_coerce_record(raw, line_no))
    else:
        raise ValueError(f"unknown corpus format {format!r}")
    return records


def write_records(records: Sequence[GrantRecord], path: str | Path, format: str = "csv") -> None:
    """Write records in the same schema ``load_records`` accepts."""
    path = Path(path)
    if format == "csv":
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(REQUIRED_COLUMNS)
            for r in records:
                writer.writerow(
                    [r.record_id, r.title, r.abstract, r.fiscal_year, r.amount,
                     r.institute, r.activity_code, r.department]
                )
    elif format == "jsonl":
        with path.open("w", encoding="utf-8") as fh:
            for r in records:
                fh.write(json.dumps({
                    "record_id": r.record_id,
                    "title": r.title,
                    "abstract": r.abstract,
                    "fiscal_year": r.fiscal_year,
                    "amount": r.amount,
                    "institute": r.institute,
                    "activity_code": r.activity_code,
                    "department": r.department,
                }, sort_keys=True))
                fh.write("\n")
    else:
        raise ValueError(f"unknown corpus format {format!r}")


def filter_records(
    records: Sequence[GrantRecord],
    criteria: FilterCriteria,
    token_counter: Callable[[str], int],
) -> tuple[list[GrantRecord], FunnelReport]:
    """Apply the inclusion funnel and report survivors after each stage.

    Stages, in order: non-empty abstract, token count >= min_tokens,
    institute membership, activity prefix minus exclusions. ``token_counter``
    must return the post-preprocessing token count of an abstract (see
    ``text.make_token_counter``).

    Raises CorpusError on duplicate record ids or fiscal years outside
    ``criteria.year_range``; renewals are distinct records and are never
    deduplicated.
    """
    seen: set[str] = set()
    start, end = criteria.year_range
    for r in records:
        if r.record_id in seen:
            raise CorpusError(f"duplicate record_id {r.record_id!r}")
        seen.add(r.record_id)
        if not start <= r.fiscal_year <= end:
            raise CorpusError(
                f"record {r.record_id!r} fiscal_year {r.fiscal_year} outside "
                f"configured range [{start}, {end}]"
            )

    report = FunnelReport()
    current = list(records)
    report.stages.append(("input", len(current)))

    current = [r for r in current if r.abstract.strip()]
    report.stages.append(("nonempty_abstract", len(current)))

    current = [r for r in current if token_counter(r.abstract) >= criteria.min_tokens]
    report.stages.append(("min_tokens", len(current)))

    if criteria.institutes:
        current = [r for r in current if r.institute in criteria.institutes]
    report.stages.append(("institute", len(current)))

    if criteria.activity_prefixes:
        current = [
            r
            for r in current
            if any(r.activity_code.startswith(p) for p in criteria.activity_prefixes)
        ]
    current = [r for r in current if r.activity_code not in criteria.excluded_activities]
    report.stages.append(("activity", len(current)))

    return current, report
