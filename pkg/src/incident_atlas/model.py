"""Canonical data types for the atlas pipeline.

Every record is a plain value type: construct once, never mutate, share
freely across threads. Serialization is snake_case JSON with the exact
field names defined here; every stage artifact on disk uses these shapes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from enum import Enum
from urllib.parse import urlparse


class RiskTier(str, Enum):
    """Regulatory risk classification. Exactly three tiers, no sub-tiers."""

    LOW = "low"
    HIGH = "high"
    UNACCEPTABLE = "unacceptable"


class SdgDirection(str, Enum):
    SUPPORTS = "supports"
    UNDERMINES = "undermines"


#: The five descriptive components of a use, in canonical order.
COMPONENT_FIELDS = ("domain", "purpose", "capability", "ai_user", "ai_subject")

SDG_MIN, SDG_MAX = 1, 17


@dataclass(frozen=True)
class Violation:
    """One broken invariant: where it happened and why."""

    path: str
    reason: str


@dataclass
class ValidationReport:
    """Violations are hard failures; warnings flag permitted-but-unusual data."""

    violations: list[Violation] = field(default_factory=list)
    warnings: list[Violation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def extend(self, other: "ValidationReport") -> None:
        self.violations.extend(other.violations)
        self.warnings.extend(other.warnings)


@dataclass(frozen=True)
class IncidentRecord:
    """One raw incident as ingested from a snapshot dump."""

    incident_id: int
    title: str
    description: str
    date: str | None = None
    source_urls: tuple[str, ...] = ()
    matched_keywords: tuple[str, ...] = ()

    def __post_init__(self):
        # whatever container arrives, equality and hashing see one shape
        object.__setattr__(self, "source_urls", tuple(self.source_urls))
        object.__setattr__(self, "matched_keywords", tuple(self.matched_keywords))

    def to_dict(self) -> dict:
        out = {
            "incident_id": self.incident_id,
            "title": self.title,
            "description": self.description,
            "date": self.date,
            "source_urls": list(self.source_urls),
        }
        if self.matched_keywords:
            out["matched_keywords"] = list(self.matched_keywords)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "IncidentRecord":
        return cls(
            incident_id=d["incident_id"],
            title=d["title"],
            description=d["description"],
            date=d.get("date"),
            source_urls=list(d.get("source_urls", [])),
            matched_keywords=list(d.get("matched_keywords", [])),
        )


@dataclass(frozen=True)
class SdgImpact:
    """How a use touches one Sustainable Development Goal."""

    sdg_id: int
    direction: SdgDirection
    examples: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "examples", tuple(self.examples))

    def to_dict(self) -> dict:
        return {
            "sdg_id": self.sdg_id,
            "direction": self.direction.value,
            "examples": list(self.examples),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SdgImpact":
        return cls(
            sdg_id=d["sdg_id"],
            direction=SdgDirection(d["direction"]),
            examples=list(d.get("examples", [])),
        )


@dataclass(frozen=True)
class UseDraft:
    """A use after formatting: five components and incident linkage, no assessment yet."""

    use_id: str
    incident_ids: tuple[int, ...]
    domain: str
    purpose: str
    capability: str
    ai_user: str
    ai_subject: str

    def __post_init__(self):
        object.__setattr__(self, "incident_ids", tuple(self.incident_ids))

    def to_dict(self) -> dict:
        return {
            "use_id": self.use_id,
            "incident_ids": list(self.incident_ids),
            "domain": self.domain,
            "purpose": self.purpose,
            "capability": self.capability,
            "ai_user": self.ai_user,
            "ai_subject": self.ai_subject,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "UseDraft":
        return cls(
            use_id=d["use_id"],
            incident_ids=list(d["incident_ids"]),
            domain=d["domain"],
            purpose=d["purpose"],
            capability=d["capability"],
            ai_user=d["ai_user"],
            ai_subject=d["ai_subject"],
        )


@dataclass(frozen=True)
class UseRecord:
    """One fully assessed AI use in the five-component format."""

    use_id: str
    incident_ids: tuple[int, ...]
    domain: str
    purpose: str
    capability: str
    ai_user: str
    ai_subject: str
    risk: RiskTier
    sdg_impacts: tuple[SdgImpact, ...] = ()
    incident_examples: tuple[str, ...] = ()
    benefit_examples: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "incident_ids", tuple(self.incident_ids))
        object.__setattr__(self, "sdg_impacts", tuple(self.sdg_impacts))
        object.__setattr__(self, "incident_examples", tuple(self.incident_examples))
        object.__setattr__(self, "benefit_examples", tuple(self.benefit_examples))

    def to_dict(self) -> dict:
        return {
            "use_id": self.use_id,
            "incident_ids": list(self.incident_ids),
            "domain": self.domain,
            "purpose": self.purpose,
            "capability": self.capability,
            "ai_user": self.ai_user,
            "ai_subject": self.ai_subject,
            "risk": self.risk.value,
            "sdg_impacts": [s.to_dict() for s in self.sdg_impacts],
            "incident_examples": list(self.incident_examples),
            "benefit_examples": list(self.benefit_examples),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "UseRecord":
        return cls(
            use_id=d["use_id"],
            incident_ids=list(d["incident_ids"]),
            domain=d["domain"],
            purpose=d["purpose"],
            capability=d["capability"],
            ai_user=d["ai_user"],
            ai_subject=d["ai_subject"],
            risk=RiskTier(d["risk"]),
            sdg_impacts=[SdgImpact.from_dict(s) for s in d.get("sdg_impacts", [])],
            incident_examples=list(d.get("incident_examples", [])),
            benefit_examples=list(d.get("benefit_examples", [])),
        )


@dataclass(frozen=True)
class Dataset:
    """Assessed uses plus the incidents they reference."""

    uses: tuple[UseRecord, ...]
    incidents: tuple[IncidentRecord, ...]
    created_at: str
    source_snapshot: str = ""

    def __post_init__(self):
        object.__setattr__(self, "uses", tuple(self.uses))
        object.__setattr__(self, "incidents", tuple(self.incidents))

    def to_dict(self) -> dict:
        return {
            "uses": [u.to_dict() for u in self.uses],
            "incidents": [i.to_dict() for i in self.incidents],
            "created_at": self.created_at,
            "source_snapshot": self.source_snapshot,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Dataset":
        return cls(
            uses=[UseRecord.from_dict(u) for u in d["uses"]],
            incidents=[IncidentRecord.from_dict(i) for i in d["incidents"]],
            created_at=d["created_at"],
            source_snapshot=d.get("source_snapshot", ""),
        )


@dataclass(frozen=True)
class SummaryStats:
    """Exact counts over a validated dataset."""

    total_uses: int
    total_incidents: int
    risk_counts: dict
    supported_sdgs: int
    undermined_sdgs: int

    def to_dict(self) -> dict:
        return {
            "total_uses": self.total_uses,
            "total_incidents": self.total_incidents,
            "risk_counts": dict(self.risk_counts),
            "supported_sdgs": self.supported_sdgs,
            "undermined_sdgs": self.undermined_sdgs,
        }


def is_absolute_url(url: str) -> bool:
    parsed = urlparse(url)
    return parsed.scheme in ("http", "https") and bool(parsed.netloc)


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp, accepting a trailing 'Z'."""
    return datetime.fromisoformat(value.replace("Z", "+00:00"))


def utc_now() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat().replace("+00:00", "Z")


def _check_components(record, report: ValidationReport, prefix: str = "") -> None:
    for name in COMPONENT_FIELDS:
        value = getattr(record, name)
        if not isinstance(value, str) or not value.strip():
            report.violations.append(Violation(prefix + name, "must be non-empty text"))


def validate_incident(incident: IncidentRecord) -> ValidationReport:
    report = ValidationReport()
    if not isinstance(incident.incident_id, int) or isinstance(incident.incident_id, bool) \
            or incident.incident_id <= 0:
        report.violations.append(Violation("incident_id", "must be a positive integer"))
    if not incident.title.strip():
        report.violations.append(Violation("title", "must be non-empty after trimming"))
    if not incident.description.strip():
        report.violations.append(Violation("description", "must be non-empty after trimming"))
    if incident.date is not None:
        try:
            date.fromisoformat(incident.date)
        except (TypeError, ValueError):
            report.violations.append(Violation("date", f"not an ISO-8601 date: {incident.date!r}"))
    for k, url in enumerate(incident.source_urls):
        if not is_absolute_url(url):
            report.violations.append(Violation(f"source_urls[{k}]", f"not an absolute URL: {url!r}"))
    return report


def validate_draft(draft: UseDraft) -> ValidationReport:
    """Check the parts of a use that exist before assessment."""
    report = ValidationReport()
    if not draft.use_id.strip():
        report.violations.append(Violation("use_id", "must be non-empty"))
    _check_components(draft, report)
    if not draft.incident_ids:
        report.violations.append(Violation("incident_ids", "must reference at least one incident"))
    return report


def validate_use(record: UseRecord) -> ValidationReport:
    """List every invariant a use record violates. Empty report means valid.

    Pure and idempotent: the same record always yields the same report.
    """
    report = ValidationReport()
    if not record.use_id.strip():
        report.violations.append(Violation("use_id", "must be non-empty"))
    _check_components(record, report)
    if not record.incident_ids:
        report.violations.append(Violation("incident_ids", "must reference at least one incident"))

    if not isinstance(record.risk, RiskTier):
        report.violations.append(Violation("risk", f"unknown risk tier: {record.risk!r}"))

    seen_directions: set[tuple[int, str]] = set()
    sdg_directions: dict[int, set[str]] = {}
    for k, impact in enumerate(record.sdg_impacts):
        path = f"sdg_impacts[{k}]"
        if not (SDG_MIN <= impact.sdg_id <= SDG_MAX):
            report.violations.append(
                Violation(f"{path}.sdg_id", f"must be in {SDG_MIN}..{SDG_MAX}, got {impact.sdg_id}")
            )
        if not 1 <= len(impact.examples) <= 3:
            report.violations.append(
                Violation(f"{path}.examples", f"must hold 1..3 examples, got {len(impact.examples)}")
            )
        key = (impact.sdg_id, impact.direction.value)
        if key in seen_directions:
            report.violations.append(
                Violation(path, f"duplicate entry for SDG {impact.sdg_id} ({impact.direction.value})")
            )
        seen_directions.add(key)
        sdg_directions.setdefault(impact.sdg_id, set()).add(impact.direction.value)

    # Permitted but worth surfacing: the same goal both helped and harmed.
    for sdg_id, directions in sorted(sdg_directions.items()):
        if len(directions) == 2:
            report.warnings.append(
                Violation("sdg_impacts", f"SDG {sdg_id} is both supported and undermined")
            )

    if not 1 <= len(record.incident_examples) <= 3:
        report.violations.append(
            Violation("incident_examples", f"must hold 1..3 examples, got {len(record.incident_examples)}")
        )
    if len(record.benefit_examples) > 3:
        report.violations.append(
            Violation("benefit_examples", f"must hold 0..3 examples, got {len(record.benefit_examples)}")
        )
    return report


def validate_dataset(dataset: Dataset) -> ValidationReport:
    """Validate every record plus the cross-record invariants."""
    report = ValidationReport()

    incident_ids: set[int] = set()
    for idx, incident in enumerate(dataset.incidents):
        sub = validate_incident(incident)
        for v in sub.violations:
            report.violations.append(Violation(f"incidents[{idx}].{v.path}", v.reason))
        if incident.incident_id in incident_ids:
            report.violations.append(
                Violation(f"incidents[{idx}].incident_id", f"duplicate incident_id {incident.incident_id}")
            )
        incident_ids.add(incident.incident_id)

    use_ids: set[str] = set()
    for idx, use in enumerate(dataset.uses):
        sub = validate_use(use)
        for v in sub.violations:
            report.violations.append(Violation(f"uses[{idx}].{v.path}", v.reason))
        for v in sub.warnings:
            report.warnings.append(Violation(f"uses[{idx}].{v.path}", v.reason))
        if use.use_id in use_ids:
            report.violations.append(Violation(f"uses[{idx}].use_id", f"duplicate use_id {use.use_id!r}"))
        use_ids.add(use.use_id)
        for k, incident_id in enumerate(use.incident_ids):
            if incident_id not in incident_ids:
                report.violations.append(
                    Violation(f"uses[{idx}].incident_ids[{k}]", f"unknown incident_id {incident_id}")
                )

    try:
        parse_timestamp(dataset.created_at)
    except (TypeError, ValueError):
        report.violations.append(
            Violation("created_at", f"not an ISO-8601 timestamp: {dataset.created_at!r}")
        )
    return report


def dataset_summary(dataset: Dataset) -> SummaryStats:
    """Exact tier and SDG counts for a dataset that passes validation.

    Raises:
        ValidationError: if the dataset violates any invariant.
    """
    from .errors import ValidationError

    report = validate_dataset(dataset)
    if not report.valid:
        lines = "; ".join(f"{v.path}: {v.reason}" for v in report.violations)
        raise ValidationError(f"dataset invalid: {lines}", violations=report.violations)

    risk_counts = {tier.value: 0 for tier in RiskTier}
    supported: set[int] = set()
    undermined: set[int] = set()
    for use in dataset.uses:
        risk_counts[use.risk.value] += 1
        for impact in use.sdg_impacts:
            if impact.direction is SdgDirection.SUPPORTS:
                supported.add(impact.sdg_id)
            else:
                undermined.add(impact.sdg_id)

    return SummaryStats(
        total_uses=len(dataset.uses),
        total_incidents=len(dataset.incidents),
        risk_counts=risk_counts,
        supported_sdgs=len(supported),
        undermined_sdgs=len(undermined),
    )
