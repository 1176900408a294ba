"""Merge human risk and SDG annotations into drafts, producing the dataset.

Annotations live in a separate hand-edited file keyed by use_id, so review
rounds stay diffable. The merge is strict: every draft needs exactly one
annotation and vice versa, and the annotated text never replaces the
formatted five components.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import InputError, ReconciliationError, ValidationError
from .model import (
    Dataset,
    IncidentRecord,
    RiskTier,
    SdgImpact,
    UseDraft,
    UseRecord,
    utc_now,
    validate_dataset,
)

TIMESTAMP_ENV = "SOURCE_DATE_EPOCH"


@dataclass(frozen=True)
class AnnotationEntry:
    use_id: str
    risk: RiskTier
    sdg_impacts: list[SdgImpact] = field(default_factory=list)
    incident_examples: list[str] = field(default_factory=list)
    benefit_examples: list[str] = field(default_factory=list)

    @classmethod
    def from_dict(cls, d: dict) -> "AnnotationEntry":
        try:
            return cls(
                use_id=d["use_id"],
                risk=RiskTier(d["risk"]),
                sdg_impacts=[SdgImpact.from_dict(s) for s in d.get("sdg_impacts", [])],
                incident_examples=list(d.get("incident_examples", [])),
                benefit_examples=list(d.get("benefit_examples", [])),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"malformed annotation entry {d.get('use_id', '?')!r}: {exc}")


def load_annotations(payload: dict | list) -> list[AnnotationEntry]:
    """Parse an annotation file body; entries may sit under an 'entries' key."""
    entries = payload.get("entries") if isinstance(payload, dict) else payload
    if not isinstance(entries, list):
        raise InputError("annotation file must be a list or an object with 'entries'")
    parsed = [AnnotationEntry.from_dict(e) for e in entries]
    seen: set[str] = set()
    for entry in parsed:
        if entry.use_id in seen:
            raise InputError(f"annotation file repeats use_id {entry.use_id!r}")
        seen.add(entry.use_id)
    return parsed


def resolve_timestamp(explicit: str | None = None) -> str:
    """Pick the dataset timestamp: explicit value, then SOURCE_DATE_EPOCH, then now.

    The environment hook makes whole pipeline runs byte-reproducible without
    threading a timestamp through every stage.
    """
    if explicit:
        return explicit
    epoch = os.environ.get(TIMESTAMP_ENV)
    if epoch:
        try:
            moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
        except (ValueError, OverflowError) as exc:
            raise InputError(f"{TIMESTAMP_ENV} is not a UNIX timestamp: {epoch!r}") from exc
        return moment.isoformat().replace("+00:00", "Z")
    return utc_now()


def merge_annotations(
    drafts: list[UseDraft],
    annotations: list[AnnotationEntry],
    incidents: list[IncidentRecord],
    created_at: str | None = None,
    source_snapshot: str = "",
) -> Dataset:
    """Combine drafts with their annotations into a validated Dataset.

    Drafts and annotations must match one-to-one on use_id; any difference
    aborts with both directions of the mismatch listed.
    """
    draft_ids = {d.use_id for d in drafts}
    annotation_ids = {a.use_id for a in annotations}
    missing = sorted(draft_ids - annotation_ids)
    extra = sorted(annotation_ids - draft_ids)
    if missing or extra:
        raise ReconciliationError(
            f"{len(missing)} draft(s) lack annotations, {len(extra)} annotation(s) lack drafts",
            missing=missing,
            extra=extra,
        )

    by_id = {a.use_id: a for a in annotations}
    uses = []
    for draft in drafts:
        entry = by_id[draft.use_id]
        uses.append(
            UseRecord(
                use_id=draft.use_id,
                incident_ids=list(draft.incident_ids),
                domain=draft.domain,
                purpose=draft.purpose,
                capability=draft.capability,
                ai_user=draft.ai_user,
                ai_subject=draft.ai_subject,
                risk=entry.risk,
                sdg_impacts=list(entry.sdg_impacts),
                incident_examples=list(entry.incident_examples),
                benefit_examples=list(entry.benefit_examples),
            )
        )

    dataset = Dataset(
        uses=uses,
        incidents=list(incidents),
        created_at=resolve_timestamp(created_at),
        source_snapshot=source_snapshot,
    )
    report = validate_dataset(dataset)
    if not report.valid:
        raise ValidationError(
            f"merged dataset violates {len(report.violations)} invariant(s)",
            violations=report.violations,
        )
    return dataset
