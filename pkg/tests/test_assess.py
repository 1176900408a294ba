"""Annotation merge: strict reconciliation, component preservation, timestamps."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from incident_atlas.assess import (
    TIMESTAMP_ENV,
    AnnotationEntry,
    load_annotations,
    merge_annotations,
    resolve_timestamp,
)
from incident_atlas.errors import InputError, ReconciliationError, ValidationError
from incident_atlas.model import IncidentRecord, RiskTier, SdgDirection, SdgImpact, UseDraft


def draft(n, incident_id=None):
    return UseDraft(
        use_id=f"use-{n:03d}",
        incident_ids=(incident_id or n,),
        domain="transport",
        purpose=f"moving people variant {n}",
        capability=f"route planning variant {n}",
        ai_user="dispatchers",
        ai_subject="passengers",
    )


def annotation(n, risk=RiskTier.LOW, **extra):
    extra.setdefault("incident_examples", [f"documented case {n}"])
    return AnnotationEntry(use_id=f"use-{n:03d}", risk=risk, **extra)


def incident(n):
    return IncidentRecord(
        incident_id=n, title=f"Incident {n}", description=f"Something happened, case {n}."
    )


class TestLoadAnnotations:
    def test_list_and_entries_forms(self):
        raw = [{"use_id": "use-001", "risk": "low"}]
        assert load_annotations(raw)[0].risk is RiskTier.LOW
        assert load_annotations({"entries": raw})[0].use_id == "use-001"

    def test_full_entry(self):
        raw = [
            {
                "use_id": "use-001",
                "risk": "high",
                "sdg_impacts": [
                    {"sdg_id": 3, "direction": "supports", "examples": ["better triage"]}
                ],
                "incident_examples": ["a documented failure"],
                "benefit_examples": ["a documented win"],
            }
        ]
        entry = load_annotations(raw)[0]
        assert entry.risk is RiskTier.HIGH
        assert entry.sdg_impacts[0].sdg_id == 3
        assert entry.sdg_impacts[0].direction is SdgDirection.SUPPORTS
        assert entry.incident_examples == ["a documented failure"]

    def test_duplicate_use_id_rejected(self):
        raw = [{"use_id": "use-001", "risk": "low"}, {"use_id": "use-001", "risk": "high"}]
        with pytest.raises(InputError, match="repeats use_id"):
            load_annotations(raw)

    def test_unknown_risk_rejected(self):
        with pytest.raises(InputError, match="use-001"):
            load_annotations([{"use_id": "use-001", "risk": "catastrophic"}])

    def test_missing_use_id_rejected(self):
        with pytest.raises(InputError, match="malformed annotation"):
            load_annotations([{"risk": "low"}])

    def test_wrong_shape_rejected(self):
        with pytest.raises(InputError, match="list"):
            load_annotations({"rows": []})


class TestResolveTimestamp:
    def test_explicit_wins(self, monkeypatch):
        monkeypatch.setenv(TIMESTAMP_ENV, "1700000000")
        assert resolve_timestamp("2024-03-15T00:00:00Z") == "2024-03-15T00:00:00Z"

    def test_env_epoch_formats_utc(self, monkeypatch):
        monkeypatch.setenv(TIMESTAMP_ENV, "1710460800")
        assert resolve_timestamp() == "2024-03-15T00:00:00Z"

    def test_bad_epoch_rejected(self, monkeypatch):
        monkeypatch.setenv(TIMESTAMP_ENV, "yesterday")
        with pytest.raises(InputError, match=TIMESTAMP_ENV):
            resolve_timestamp()

    def test_wall_clock_fallback_shape(self, monkeypatch):
        monkeypatch.delenv(TIMESTAMP_ENV, raising=False)
        stamp = resolve_timestamp()
        assert stamp.endswith("Z")
        assert "T" in stamp


class TestMergeAnnotations:
    def test_merge_preserves_components_verbatim(self):
        drafts = [draft(1), draft(2)]
        annotations = [
            annotation(
                1,
                risk=RiskTier.HIGH,
                sdg_impacts=[SdgImpact(11, SdgDirection.SUPPORTS, ("safer streets",))],
                incident_examples=["crash report"],
            ),
            annotation(2),
        ]
        dataset = merge_annotations(
            drafts, annotations, [incident(1), incident(2)], created_at="2024-03-15T00:00:00Z"
        )
        assert len(dataset.uses) == 2
        for d, u in zip(drafts, dataset.uses):
            assert (u.domain, u.purpose, u.capability, u.ai_user, u.ai_subject) == (
                d.domain,
                d.purpose,
                d.capability,
                d.ai_user,
                d.ai_subject,
            )
        assert dataset.uses[0].risk is RiskTier.HIGH
        assert dataset.uses[0].sdg_impacts[0].sdg_id == 11
        assert dataset.created_at == "2024-03-15T00:00:00Z"

    def test_merge_keeps_draft_order(self):
        drafts = [draft(2, incident_id=2), draft(1, incident_id=1)]
        annotations = [annotation(1), annotation(2)]
        dataset = merge_annotations(
            drafts, annotations, [incident(1), incident(2)], created_at="2024-03-15T00:00:00Z"
        )
        assert [u.use_id for u in dataset.uses] == ["use-002", "use-001"]

    def test_unannotated_draft_reported(self):
        with pytest.raises(ReconciliationError) as info:
            merge_annotations([draft(1), draft(2)], [annotation(1)], [incident(1), incident(2)])
        assert info.value.missing == ["use-002"]
        assert info.value.extra == []

    def test_orphan_annotation_reported(self):
        with pytest.raises(ReconciliationError) as info:
            merge_annotations([draft(1)], [annotation(1), annotation(9)], [incident(1)])
        assert info.value.missing == []
        assert info.value.extra == ["use-009"]

    def test_both_directions_reported_sorted(self):
        with pytest.raises(ReconciliationError) as info:
            merge_annotations(
                [draft(3), draft(1)], [annotation(1), annotation(8), annotation(5)], [incident(1)]
            )
        assert info.value.missing == ["use-003"]
        assert info.value.extra == ["use-005", "use-008"]

    def test_empty_merge(self):
        dataset = merge_annotations([], [], [], created_at="2024-03-15T00:00:00Z")
        assert dataset.uses == ()
        assert dataset.incidents == ()

    def test_unknown_incident_reference_fails_validation(self):
        with pytest.raises(ValidationError):
            merge_annotations(
                [draft(1, incident_id=42)],
                [annotation(1)],
                [incident(1)],
                created_at="2024-03-15T00:00:00Z",
            )

    def test_duplicate_sdg_direction_fails_validation(self):
        bad = annotation(
            1,
            sdg_impacts=[
                SdgImpact(3, SdgDirection.SUPPORTS, ("one",)),
                SdgImpact(3, SdgDirection.SUPPORTS, ("two",)),
            ],
        )
        with pytest.raises(ValidationError):
            merge_annotations([draft(1)], [bad], [incident(1)], created_at="2024-03-15T00:00:00Z")

    @given(st.permutations(list(range(1, 8))))
    def test_annotation_order_never_matters(self, order):
        drafts = [draft(n) for n in range(1, 8)]
        incidents = [incident(n) for n in range(1, 8)]
        annotations = [annotation(n) for n in order]
        dataset = merge_annotations(
            drafts, annotations, incidents, created_at="2024-03-15T00:00:00Z"
        )
        assert [u.use_id for u in dataset.uses] == [d.use_id for d in drafts]
