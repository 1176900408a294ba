"""Rewrite incidents into the five-component use format via a chat endpoint.

Every response is cached under a key derived from the incident and the
prompt, so a live run can later be replayed bit-identically with no network
at all. Replay mode is the default posture for tests and rebuilds; live
mode appends to the cache and never overwrites what is already there.

The API credential is read from the ATLAS_FORMATTER_API_KEY environment
variable and sent as a bearer token. Its value is never logged.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import time
from dataclasses import dataclass, replace
from pathlib import Path

import requests

from .errors import (
    AtlasError,
    CacheMissError,
    InputError,
    ProtocolError,
    ResponseFormatError,
    TransportError,
)
from .jsonio import read_json, write_json
from .model import IncidentRecord, UseDraft, validate_draft

logger = logging.getLogger(__name__)

API_KEY_ENV = "ATLAS_FORMATTER_API_KEY"
COMPONENT_CHAR_CAP = 200
MODES = ("live", "replay")
_RETRY_BACKOFF_SECONDS = 0.05

DEFAULT_PROMPT_TEMPLATE = (
    "Rewrite the following AI incident as a single structured description of the AI use"
    " involved. Answer in exactly five lines, nothing else:\n"
    "Domain: <the application industry or sector, a few words>\n"
    "Purpose: <what the deployment is for, one sentence fragment>\n"
    "Capability: <what the technology does, one sentence fragment>\n"
    "AI user: <who operates the AI system>\n"
    "AI subject: <who the AI system acts upon>\n"
    "\n"
    "Incident title: {title}\n"
    "Incident description: {description}\n"
)

REPROMPT_TEMPLATE = (
    "Your previous answer could not be parsed into the five labeled lines:\n"
    "{response}\n"
    "\n"
    "Answer again for the same incident, in exactly five lines labeled"
    " Domain:, Purpose:, Capability:, AI user:, AI subject: and nothing else.\n"
    "\n"
    "Incident title: {title}\n"
    "Incident description: {description}\n"
)

_LABEL_TO_FIELD = {
    "domain": "domain",
    "purpose": "purpose",
    "capability": "capability",
    "ai user": "ai_user",
    "ai subject": "ai_subject",
}
_COMPONENT_LINE_RE = re.compile(
    r"^\s*[-*]?\s*(domain|purpose|capability|ai user|ai subject)\s*:\s*(.*)$",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class FormatterConfig:
    mode: str = "replay"
    cache_path: str = "formatter_cache.json"
    endpoint_url: str | None = None
    model_name: str | None = None
    prompt_template: str = DEFAULT_PROMPT_TEMPLATE
    timeout: float = 30.0
    max_retries: int = 3

    def validate(self) -> None:
        if self.mode not in MODES:
            raise InputError(f"formatter mode must be one of {MODES}")
        if not self.cache_path:
            raise InputError("cache_path is required")
        if self.mode == "live" and not (self.endpoint_url and self.model_name):
            raise InputError("live mode requires endpoint_url and model_name")
        if self.mode == "replay" and not Path(self.cache_path).exists():
            raise InputError(f"replay mode requires an existing cache at {self.cache_path}")
        if "{title}" not in self.prompt_template or "{description}" not in self.prompt_template:
            raise InputError("prompt_template must contain {title} and {description}")
        if self.max_retries < 1:
            raise InputError("max_retries must be at least 1")

    @classmethod
    def from_dict(cls, d: dict) -> "FormatterConfig":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})


def request_key(incident_id: int, prompt_identity: str) -> str:
    """Deterministic cache key for one request.

    The identity string is the prompt template for first attempts and the
    fully rendered reprompt for retries, so a changed template or a
    different malformed response can never collide with an older entry.
    """
    payload = json.dumps([incident_id, prompt_identity], ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ResponseCache:
    """Append-only store of raw endpoint responses, persisted as JSON."""

    def __init__(self, entries: dict[str, str] | None = None, path: str | None = None):
        self.entries = dict(entries or {})
        self.path = path

    @classmethod
    def load(cls, path: str) -> "ResponseCache":
        if Path(path).exists():
            payload = read_json(path)
            entries = payload.get("entries")
            if not isinstance(entries, dict):
                raise InputError(f"cache file {path} lacks an 'entries' object")
            return cls(entries, path)
        return cls({}, path)

    def get(self, key: str) -> str | None:
        return self.entries.get(key)

    def put(self, key: str, response: str) -> bool:
        """Store a response unless the key is already present (append-only)."""
        if key in self.entries:
            return False
        self.entries[key] = response
        if self.path:
            self.save()
        return True

    def save(self) -> None:
        write_json(self.path, {"entries": self.entries})


def _render(template: str, incident: IncidentRecord, response: str | None = None) -> str:
    # str.format would choke on literal braces in user templates.
    rendered = template.replace("{title}", incident.title)
    rendered = rendered.replace("{description}", incident.description)
    if response is not None:
        rendered = rendered.replace("{response}", response)
    return rendered


def _cap_component(value: str, incident_id: int, field: str) -> str:
    if len(value) <= COMPONENT_CHAR_CAP:
        return value
    cut = value[:COMPONENT_CHAR_CAP]
    boundary = cut.rfind(" ")
    if boundary > 0:
        cut = cut[:boundary]
    cut = cut.rstrip()
    logger.warning(
        "incident %d: %s truncated from %d to %d characters",
        incident_id, field, len(value), len(cut),
    )
    return cut


def parse_components(text: str) -> dict[str, str]:
    """Extract the five labeled components; first occurrence of a label wins."""
    found: dict[str, str] = {}
    for line in text.splitlines():
        match = _COMPONENT_LINE_RE.match(line)
        if not match:
            continue
        field = _LABEL_TO_FIELD[match.group(1).lower()]
        value = match.group(2).strip()
        if value and field not in found:
            found[field] = value
    missing = [f for f in _LABEL_TO_FIELD.values() if f not in found]
    if missing:
        raise ResponseFormatError(
            f"response lacks labeled components: {', '.join(missing)}", raw_response=text
        )
    return found


def _call_endpoint(prompt: str, config: FormatterConfig) -> str:
    headers = {}
    credential = os.environ.get(API_KEY_ENV)
    if credential:
        headers["Authorization"] = f"Bearer {credential}"
    body = {
        "model": config.model_name,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": 0,
    }
    last_error: Exception | None = None
    for attempt in range(config.max_retries):
        try:
            response = requests.post(
                config.endpoint_url, json=body, headers=headers, timeout=config.timeout
            )
            if response.status_code >= 500:
                raise requests.ConnectionError(f"server error {response.status_code}")
            if response.status_code >= 400:
                raise TransportError(
                    f"formatter endpoint rejected the request: {response.status_code}"
                )
            payload = response.json()
            break
        except (requests.ConnectionError, requests.Timeout) as exc:
            last_error = exc
            logger.warning(
                "formatter endpoint attempt %d/%d failed: %s",
                attempt + 1, config.max_retries, exc,
            )
            time.sleep(_RETRY_BACKOFF_SECONDS)
    else:
        raise TransportError(
            f"formatter endpoint unreachable after {config.max_retries} attempts: {last_error}"
        )
    try:
        content = payload["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError):
        raise ProtocolError("formatter response is not chat-completion shaped") from None
    if not isinstance(content, str):
        raise ProtocolError("formatter response content is not text")
    return content


def _resolve_response(
    incident: IncidentRecord,
    prompt_identity: str,
    rendered_prompt: str,
    config: FormatterConfig,
    cache: ResponseCache,
) -> str:
    key = request_key(incident.incident_id, prompt_identity)
    cached = cache.get(key)
    if cached is not None:
        return cached
    if config.mode == "replay":
        raise CacheMissError(
            f"incident {incident.incident_id}: no cached response for key {key[:12]}..."
        )
    response = _call_endpoint(rendered_prompt, config)
    cache.put(key, response)
    return response


def format_incident(
    incident: IncidentRecord,
    config: FormatterConfig,
    cache: ResponseCache,
    use_id: str = "",
) -> UseDraft:
    """Produce a five-component draft for one incident.

    One automatic reprompt on a malformed response, echoing the bad text
    back; a second failure raises with the raw response attached. Domain is
    normalized to lowercase; each component is capped at 200 characters,
    truncated at a word boundary.
    """
    prompt = _render(config.prompt_template, incident)
    raw = _resolve_response(incident, config.prompt_template, prompt, config, cache)
    try:
        parsed = parse_components(raw)
    except ResponseFormatError:
        logger.warning("incident %d: unparseable response, reprompting", incident.incident_id)
        reprompt = _render(REPROMPT_TEMPLATE, incident, response=raw)
        raw = _resolve_response(incident, reprompt, reprompt, config, cache)
        parsed = parse_components(raw)

    components = {
        field: _cap_component(value, incident.incident_id, field)
        for field, value in parsed.items()
    }
    components["domain"] = components["domain"].lower()
    draft = UseDraft(use_id=use_id, incident_ids=[incident.incident_id], **components)
    report = validate_draft(draft)
    problems = [v for v in report.violations if v.path != "use_id"]
    if problems:
        raise ResponseFormatError(
            "; ".join(f"{v.path}: {v.reason}" for v in problems), raw_response=raw
        )
    return draft


@dataclass(frozen=True)
class FormatFailure:
    incident_id: int
    error: str

    def to_dict(self) -> dict:
        return {"incident_id": self.incident_id, "error": self.error}


def format_batch(
    incidents: list[IncidentRecord],
    config: FormatterConfig,
    cache: ResponseCache | None = None,
) -> tuple[list[UseDraft], list[FormatFailure]]:
    """Format incidents sequentially in input order; failures never abort.

    use_ids are zero-padded ordinals over the successful drafts in output
    order: use-001, use-002, ...
    """
    config.validate()
    if cache is None:
        cache = ResponseCache.load(config.cache_path)
    drafts: list[UseDraft] = []
    failures: list[FormatFailure] = []
    for incident in incidents:
        try:
            drafts.append(format_incident(incident, config, cache))
        except AtlasError as exc:
            logger.warning("incident %d failed to format: %s", incident.incident_id, exc)
            failures.append(FormatFailure(incident.incident_id, str(exc)))
    drafts = [replace(d, use_id=f"use-{i:03d}") for i, d in enumerate(drafts, start=1)]
    return drafts, failures
