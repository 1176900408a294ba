"""Parse raw incident dumps, drop duplicates, keep the mobile-relevant slice.

Dumps arrive as JSON (a top-level array, or an object with an "incidents"
array) or CSV. Malformed entries never abort a run and are never silently
dropped: every one lands in a skip report with its position and reason.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, replace

from .errors import InputError
from .model import IncidentRecord, validate_incident

DEFAULT_KEYWORDS = (
    "mobile",
    "smartphone",
    "phone",
    "app",
    "ios",
    "android",
    "wearable",
    "smartwatch",
    "fitness tracker",
    "tablet",
    "voice assistant",
)

MATCH_MODES = ("word", "substring")

_ID_ALIASES = ("incident_id", "id")
_TITLE_ALIASES = ("title", "name")
_DESCRIPTION_ALIASES = ("description", "text", "summary")
_DATE_ALIASES = ("date", "incident_date")
_URL_ALIASES = ("source_urls", "urls", "url", "source_url")

_URL_SPLIT_RE = re.compile(r"[|\s]+")
_NON_WORD_RE = re.compile(r"[^\w\s]")


@dataclass(frozen=True)
class IngestConfig:
    keyword_list: tuple[str, ...] = DEFAULT_KEYWORDS
    match_mode: str = "word"
    date_range: tuple[str, str] | None = None
    input_path: str | None = None

    def validate(self) -> None:
        if not self.keyword_list:
            raise InputError("keyword list must not be empty")
        if any(not k.strip() for k in self.keyword_list):
            raise InputError("keywords must be non-empty strings")
        if self.match_mode not in MATCH_MODES:
            raise InputError(f"match_mode must be one of {MATCH_MODES}")
        if self.date_range is not None:
            start, end = self.date_range
            if start > end:
                raise InputError(f"date_range start {start!r} after end {end!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "IngestConfig":
        config = cls(
            keyword_list=tuple(d.get("keyword_list", d.get("keywords", DEFAULT_KEYWORDS))),
            match_mode=d.get("match_mode", "word"),
            date_range=tuple(d["date_range"]) if d.get("date_range") else None,
            input_path=d.get("input_path"),
        )
        config.validate()
        return config


@dataclass(frozen=True)
class SkippedEntry:
    """One malformed input entry: 0-based element index for JSON, file line for CSV."""

    index: int
    reason: str

    def to_dict(self) -> dict:
        return {"index": self.index, "reason": self.reason}


def _decode(data) -> str:
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, str):
        return data
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InputError(f"input is not valid UTF-8: {exc}") from exc
    raise InputError(f"cannot read incidents from {type(data).__name__}")


def _first_present(entry: dict, aliases: tuple[str, ...]):
    for name in aliases:
        if name in entry and entry[name] not in (None, ""):
            return entry[name]
    return None


def _coerce_urls(value) -> list[str]:
    if value is None:
        return []
    if isinstance(value, str):
        return [u for u in _URL_SPLIT_RE.split(value.strip()) if u]
    if isinstance(value, list):
        return [str(u).strip() for u in value if str(u).strip()]
    raise ValueError(f"source_urls must be a string or list, got {type(value).__name__}")


def _entry_to_record(entry: dict) -> IncidentRecord:
    raw_id = _first_present(entry, _ID_ALIASES)
    if raw_id is None:
        raise ValueError("missing incident id")
    try:
        incident_id = int(raw_id)
    except (TypeError, ValueError):
        raise ValueError(f"incident id {raw_id!r} is not an integer") from None

    title = _first_present(entry, _TITLE_ALIASES)
    description = _first_present(entry, _DESCRIPTION_ALIASES)
    date = _first_present(entry, _DATE_ALIASES)
    record = IncidentRecord(
        incident_id=incident_id,
        title=str(title) if title is not None else "",
        description=str(description) if description is not None else "",
        date=str(date) if date is not None else None,
        source_urls=tuple(_coerce_urls(_first_present(entry, _URL_ALIASES))),
    )
    report = validate_incident(record)
    if not report.valid:
        raise ValueError("; ".join(v.reason for v in report.violations))
    return record


def _parse_json(text: str) -> tuple[list[IncidentRecord], list[SkippedEntry]]:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"input is not valid JSON: {exc}") from exc
    if isinstance(payload, dict) and isinstance(payload.get("incidents"), list):
        entries = payload["incidents"]
    elif isinstance(payload, list):
        entries = payload
    else:
        raise InputError("JSON input must be an array or an object with an 'incidents' array")

    records, skipped = [], []
    for index, entry in enumerate(entries):
        if not isinstance(entry, dict):
            skipped.append(SkippedEntry(index, f"entry is {type(entry).__name__}, not an object"))
            continue
        try:
            records.append(_entry_to_record(entry))
        except ValueError as exc:
            skipped.append(SkippedEntry(index, str(exc)))
    return records, skipped


def _parse_csv(text: str) -> tuple[list[IncidentRecord], list[SkippedEntry]]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise InputError("CSV input has no header row")
    header = set(reader.fieldnames)
    if not header & set(_ID_ALIASES):
        raise InputError(f"CSV header lacks an incident id column (one of {_ID_ALIASES})")

    records, skipped = [], []
    for row in reader:
        entry = {k: v for k, v in row.items() if k is not None and v not in (None, "")}
        try:
            records.append(_entry_to_record(entry))
        except ValueError as exc:
            # DictReader has already consumed the row: line_num points at it.
            skipped.append(SkippedEntry(reader.line_num, str(exc)))
    return records, skipped


def parse_incidents(data, format: str = "json") -> tuple[list[IncidentRecord], list[SkippedEntry]]:
    """Parse a dump into records plus a skip report; together they cover every entry."""
    text = _decode(data)
    if format == "json":
        return _parse_json(text)
    if format == "csv":
        return _parse_csv(text)
    raise InputError(f"unknown input format {format!r} (expected 'json' or 'csv')")


def normalize_title(title: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace."""
    return " ".join(_NON_WORD_RE.sub(" ", title.lower()).split())


def deduplicate(records: list[IncidentRecord]) -> list[IncidentRecord]:
    """Keep the first record per incident_id and per normalized title."""
    seen_ids: set[int] = set()
    seen_titles: set[str] = set()
    kept = []
    for record in records:
        title_key = normalize_title(record.title)
        if record.incident_id in seen_ids or title_key in seen_titles:
            continue
        seen_ids.add(record.incident_id)
        seen_titles.add(title_key)
        kept.append(record)
    return kept


def _keyword_pattern(keyword: str, match_mode: str) -> re.Pattern:
    escaped = re.escape(keyword.lower())
    if match_mode == "word":
        # Word boundaries so "app" cannot match inside "application".
        return re.compile(rf"(?<!\w){escaped}(?!\w)")
    return re.compile(escaped)


def filter_mobile(
    records: list[IncidentRecord], config: IngestConfig | None = None
) -> list[IncidentRecord]:
    """Keep records whose title or description mentions a configured keyword.

    Kept records are annotated with the keywords that matched, in the
    configured keyword order.
    """
    config = config or IngestConfig()
    config.validate()
    patterns = [(kw, _keyword_pattern(kw, config.match_mode)) for kw in config.keyword_list]
    kept = []
    for record in records:
        text = f"{record.title}\n{record.description}".lower()
        matched = tuple(kw for kw, pattern in patterns if pattern.search(text))
        if matched:
            kept.append(replace(record, matched_keywords=matched))
    return kept


def filter_date_range(
    records: list[IncidentRecord], date_range: tuple[str, str] | None
) -> list[IncidentRecord]:
    """Keep records inside the inclusive ISO date range; undated records stay."""
    if date_range is None:
        return list(records)
    start, end = date_range
    if start > end:
        raise InputError(f"date_range start {start!r} after end {end!r}")
    return [r for r in records if r.date is None or start <= r.date <= end]


def run_ingest(
    data, format: str = "json", config: IngestConfig | None = None
) -> tuple[list[IncidentRecord], list[SkippedEntry]]:
    """Parse, deduplicate, date-filter, and keyword-filter in one pass."""
    config = config or IngestConfig()
    config.validate()
    records, skipped = parse_incidents(data, format)
    records = deduplicate(records)
    records = filter_date_range(records, config.date_range)
    records = filter_mobile(records, config)
    return records, skipped
