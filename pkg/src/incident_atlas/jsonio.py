"""Deterministic JSON reading and writing for stage artifacts.

Two writers on purpose: stage artifacts are pretty-printed for humans,
while the exported atlas uses a canonical compact form (sorted keys,
floats at a fixed 6-decimal precision) so re-exports are byte-identical.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import InputError


def read_json(path: str | Path):
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def write_json(path: str | Path, obj) -> None:
    """Pretty, key-sorted, UTF-8. Same object always yields the same bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)
    path.write_text(text + "\n", encoding="utf-8")


def canonical_dumps(obj) -> str:
    """Canonical compact JSON: sorted keys, floats rendered as %.6f."""
    return _emit(obj)


def write_canonical_json(path: str | Path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_emit(obj) + "\n", encoding="utf-8")


def _emit(obj) -> str:
    if obj is None or obj is True or obj is False:
        return json.dumps(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, bool):  # pragma: no cover - caught by the identity checks above
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"non-finite float cannot be serialized canonically: {obj}")
        return f"{obj:.6f}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_emit(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = []
        for key in sorted(obj):
            if not isinstance(key, str):
                raise ValueError(f"canonical JSON requires string keys, got {key!r}")
            items.append(json.dumps(key, ensure_ascii=False) + ":" + _emit(obj[key]))
        return "{" + ",".join(items) + "}"
    raise ValueError(f"cannot serialize {type(obj).__name__} canonically")
