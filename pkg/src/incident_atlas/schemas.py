"""JSON Schemas for every stage artifact the pipeline writes.

The exported atlas gets the strictest treatment since the service and the
frontend both consume it blind; stage schemas catch hand-edited files that
drifted. All validation goes through `validate_artifact`.
"""

from __future__ import annotations

import jsonschema

from .errors import ValidationError

_NONEMPTY_STRING = {"type": "string", "minLength": 1}
_HEX_COLOR = {"type": "string", "pattern": "^#[0-9a-fA-F]{6}$"}

_INCIDENT = {
    "type": "object",
    "required": ["incident_id", "title", "description"],
    "properties": {
        "incident_id": {"type": "integer", "minimum": 1},
        "title": _NONEMPTY_STRING,
        "description": _NONEMPTY_STRING,
        "date": {"type": ["string", "null"]},
        "source_urls": {"type": "array", "items": _NONEMPTY_STRING},
        "matched_keywords": {"type": "array", "items": _NONEMPTY_STRING},
    },
}

_SDG_IMPACT = {
    "type": "object",
    "required": ["sdg_id", "direction", "examples"],
    "properties": {
        "sdg_id": {"type": "integer", "minimum": 1, "maximum": 17},
        "direction": {"enum": ["supports", "undermines"]},
        "examples": {
            "type": "array",
            "minItems": 1,
            "maxItems": 3,
            "items": _NONEMPTY_STRING,
        },
    },
}

_USE_CORE = {
    "use_id": _NONEMPTY_STRING,
    "incident_ids": {"type": "array", "minItems": 1, "items": {"type": "integer"}},
    "domain": _NONEMPTY_STRING,
    "purpose": _NONEMPTY_STRING,
    "capability": _NONEMPTY_STRING,
    "ai_user": _NONEMPTY_STRING,
    "ai_subject": _NONEMPTY_STRING,
}

_USE_ANNOTATED = {
    **_USE_CORE,
    "risk": {"enum": ["low", "high", "unacceptable"]},
    "sdg_impacts": {"type": "array", "items": _SDG_IMPACT},
    "incident_examples": {
        "type": "array",
        "minItems": 1,
        "maxItems": 3,
        "items": _NONEMPTY_STRING,
    },
    "benefit_examples": {"type": "array", "maxItems": 3, "items": _NONEMPTY_STRING},
}

_USE_REQUIRED = [
    "use_id",
    "incident_ids",
    "domain",
    "purpose",
    "capability",
    "ai_user",
    "ai_subject",
    "risk",
    "sdg_impacts",
    "incident_examples",
    "benefit_examples",
]

_NARRATIVE_SECTION = {
    "type": "object",
    "required": ["id", "title", "body", "highlighted_use_ids"],
    "properties": {
        "id": _NONEMPTY_STRING,
        "title": _NONEMPTY_STRING,
        "body": _NONEMPTY_STRING,
        "highlighted_use_ids": {"type": "array", "items": _NONEMPTY_STRING},
    },
}

INCIDENTS_SCHEMA = {
    "type": "object",
    "required": ["incidents"],
    "properties": {"incidents": {"type": "array", "items": _INCIDENT}},
}

SKIP_REPORT_SCHEMA = {
    "type": "object",
    "required": ["skipped"],
    "properties": {
        "skipped": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["index", "reason"],
                "properties": {
                    "index": {"type": "integer", "minimum": 0},
                    "reason": _NONEMPTY_STRING,
                },
            },
        }
    },
}

DRAFTS_SCHEMA = {
    "type": "object",
    "required": ["drafts", "incidents", "failures"],
    "properties": {
        "drafts": {
            "type": "array",
            "items": {
                "type": "object",
                "required": list(_USE_CORE),
                "properties": _USE_CORE,
            },
        },
        "incidents": {"type": "array", "items": _INCIDENT},
        "failures": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["incident_id", "error"],
                "properties": {
                    "incident_id": {"type": "integer"},
                    "error": _NONEMPTY_STRING,
                },
            },
        },
    },
}

DATASET_SCHEMA = {
    "type": "object",
    "required": ["uses", "incidents", "created_at"],
    "properties": {
        "uses": {
            "type": "array",
            "items": {
                "type": "object",
                "required": _USE_REQUIRED,
                "properties": _USE_ANNOTATED,
            },
        },
        "incidents": {"type": "array", "items": _INCIDENT},
        "created_at": _NONEMPTY_STRING,
        "source_snapshot": {"type": "string"},
    },
}

EMBEDDINGS_SCHEMA = {
    "type": "object",
    "required": ["row_ids", "dims", "vectors"],
    "properties": {
        "row_ids": {"type": "array", "items": _NONEMPTY_STRING},
        "dims": {"type": "integer", "minimum": 0},
        "vectors": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}},
        },
    },
}

LAYOUT_SCHEMA = {
    "type": "object",
    "required": ["row_ids", "coordinates", "kl_trace", "config"],
    "properties": {
        "row_ids": {"type": "array", "items": _NONEMPTY_STRING},
        "coordinates": {
            "type": "array",
            "items": {
                "type": "array",
                "minItems": 2,
                "maxItems": 2,
                "items": {"type": "number", "minimum": 0, "maximum": 1},
            },
        },
        "kl_trace": {"type": "array", "items": {"type": "number"}},
        "config": {"type": "object"},
    },
}

ATLAS_SCHEMA = {
    "type": "object",
    "required": ["version", "generated_at", "uses", "narrative", "facets", "palette"],
    "properties": {
        "version": _NONEMPTY_STRING,
        "generated_at": _NONEMPTY_STRING,
        "uses": {
            "type": "array",
            "items": {
                "type": "object",
                "required": _USE_REQUIRED + ["x", "y"],
                "properties": {
                    **_USE_ANNOTATED,
                    "x": {"type": "number", "minimum": 0, "maximum": 1},
                    "y": {"type": "number", "minimum": 0, "maximum": 1},
                },
            },
        },
        "narrative": {
            "type": "array",
            "minItems": 4,
            "maxItems": 4,
            "items": _NARRATIVE_SECTION,
        },
        "facets": {
            "type": "object",
            "required": ["domain", "ai_user", "ai_subject", "risk", "sdg"],
            "additionalProperties": {
                "type": "object",
                "additionalProperties": {"type": "integer", "minimum": 1},
            },
        },
        "palette": {
            "type": "object",
            "required": ["low", "high", "unacceptable"],
            "properties": {
                "low": _HEX_COLOR,
                "high": _HEX_COLOR,
                "unacceptable": _HEX_COLOR,
            },
            "additionalProperties": False,
        },
    },
}

SCHEMAS = {
    "incidents": INCIDENTS_SCHEMA,
    "skip_report": SKIP_REPORT_SCHEMA,
    "drafts": DRAFTS_SCHEMA,
    "dataset": DATASET_SCHEMA,
    "embeddings": EMBEDDINGS_SCHEMA,
    "layout": LAYOUT_SCHEMA,
    "atlas": ATLAS_SCHEMA,
}


def validate_artifact(payload: dict, kind: str) -> None:
    """Check a stage artifact against its schema; raise with every defect listed."""
    if kind not in SCHEMAS:
        raise ValueError(f"unknown artifact kind {kind!r}")
    validator = jsonschema.Draft202012Validator(SCHEMAS[kind])
    defects = sorted(validator.iter_errors(payload), key=lambda e: list(e.absolute_path))
    if defects:
        details = "; ".join(
            f"{'/'.join(str(p) for p in d.absolute_path) or '(root)'}: {d.message}"
            for d in defects[:10]
        )
        raise ValidationError(f"{kind} artifact fails its schema: {details}")
