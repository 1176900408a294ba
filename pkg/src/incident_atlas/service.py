"""Export the self-contained atlas document and serve it read-only over HTTP.

The exported file binds uses, 2-D coordinates, facet counts, the risk
palette, and the four narrative sections into one JSON document, written
canonically (sorted keys, six-decimal floats) so identical inputs produce
byte-identical files. The service loads one document at startup, validates
it against the schema, and answers every request from memory.
"""

from __future__ import annotations

import logging
from typing import Mapping

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .assess import resolve_timestamp
from .errors import InputError, ReconciliationError, ValidationError
from .jsonio import read_json, write_canonical_json
from .model import Dataset, RiskTier, UseRecord, validate_dataset
from .schemas import validate_artifact
from .search import AtlasIndex
from .tsne import LayoutResult

logger = logging.getLogger(__name__)

ATLAS_VERSION = "1"
NARRATIVE_SECTION_COUNT = 4
MIN_CONTRAST_VS_WHITE = 3.0  # WCAG AA for non-text elements

DEFAULT_PALETTE = {
    RiskTier.UNACCEPTABLE.value: "#d7263d",
    RiskTier.HIGH.value: "#f46036",
    RiskTier.LOW.value: "#1b998b",
}

DEFAULT_NARRATIVE = [
    {
        "id": "semantic-map",
        "title": "A map of AI in your pocket",
        "body": (
            "Every dot on this map is one real-world way AI is used in mobile "
            "devices, reconstructed from publicly reported incidents. Dots that "
            "sit close together describe similar uses; distant dots have little "
            "in common. Scroll to see how the map organizes itself."
        ),
        "highlighted_use_ids": [],
    },
    {
        "id": "risk-tiers",
        "title": "Three levels of risk",
        "body": (
            "Regulators group AI uses by how much harm they can do. Watch the "
            "dots regroup into three tiers: uses considered low risk, uses that "
            "are high risk because they touch safety or rights, and uses whose "
            "risk is considered unacceptable altogether."
        ),
        "highlighted_use_ids": [],
    },
    {
        "id": "shared-traits",
        "title": "What risky uses have in common",
        "body": (
            "Uses in the same tier often share traits: who operates the system, "
            "who it acts upon, and which development goals it supports or "
            "undermines. A few examples show how the same capability can cut "
            "both ways."
        ),
        "highlighted_use_ids": [],
    },
    {
        "id": "explore",
        "title": "Explore on your own",
        "body": (
            "Now the map is yours. Filter by domain, risk tier, or development "
            "goal, search by keyword, and click any dot for the full picture: "
            "what the use does, who it affects, and the incidents behind it."
        ),
        "highlighted_use_ids": [],
    },
]


def relative_luminance(hex_color: str) -> float:
    r, g, b = (int(hex_color[i : i + 2], 16) / 255.0 for i in (1, 3, 5))

    def linearize(channel: float) -> float:
        if channel <= 0.04045:
            return channel / 12.92
        return ((channel + 0.055) / 1.055) ** 2.4

    return 0.2126 * linearize(r) + 0.7152 * linearize(g) + 0.0722 * linearize(b)


def contrast_vs_white(hex_color: str) -> float:
    return 1.05 / (relative_luminance(hex_color) + 0.05)


def validate_palette(palette: Mapping[str, str]) -> None:
    """Every risk tier needs one #rrggbb color readable against white."""
    tiers = {t.value for t in RiskTier}
    if set(palette) != tiers:
        raise InputError(f"palette keys must be exactly {sorted(tiers)}, got {sorted(palette)}")
    for tier, color in palette.items():
        if not (
            isinstance(color, str)
            and len(color) == 7
            and color[0] == "#"
            and all(c in "0123456789abcdefABCDEF" for c in color[1:])
        ):
            raise InputError(f"palette[{tier}] is not a #rrggbb color: {color!r}")
        ratio = contrast_vs_white(color)
        if ratio < MIN_CONTRAST_VS_WHITE:
            raise InputError(
                f"palette[{tier}] = {color} has contrast {ratio:.2f} against white,"
                f" below the required {MIN_CONTRAST_VS_WHITE}:1"
            )


def validate_narrative(sections: list, known_use_ids: set[str]) -> None:
    if not isinstance(sections, list) or len(sections) != NARRATIVE_SECTION_COUNT:
        raise InputError(
            f"narrative must have exactly {NARRATIVE_SECTION_COUNT} sections,"
            f" got {len(sections) if isinstance(sections, list) else type(sections).__name__}"
        )
    seen_ids: set[str] = set()
    for position, section in enumerate(sections):
        for field in ("id", "title", "body"):
            value = section.get(field)
            if not isinstance(value, str) or not value.strip():
                raise InputError(f"narrative[{position}].{field} must be non-empty text")
        if section["id"] in seen_ids:
            raise InputError(f"narrative section id {section['id']!r} repeats")
        seen_ids.add(section["id"])
        highlighted = section.get("highlighted_use_ids", [])
        unknown = [u for u in highlighted if u not in known_use_ids]
        if unknown:
            raise InputError(
                f"narrative[{position}] highlights unknown use_ids: {unknown}"
            )


def export_atlas(
    dataset: Dataset,
    layout: LayoutResult | dict,
    narrative: list | None = None,
    palette: Mapping[str, str] | None = None,
    generated_at: str | None = None,
    version: str = ATLAS_VERSION,
) -> dict:
    """Assemble the atlas document from a dataset and its layout.

    Dataset and layout must cover exactly the same use_ids; uses keep
    dataset order and gain their x, y coordinates.
    """
    report = validate_dataset(dataset)
    if not report.valid:
        raise ValidationError(
            f"dataset violates {len(report.violations)} invariant(s)",
            violations=report.violations,
        )
    layout_dict = layout.to_dict() if isinstance(layout, LayoutResult) else layout
    row_ids = list(layout_dict["row_ids"])
    coordinates = layout_dict["coordinates"]
    if len(row_ids) != len(coordinates):
        raise InputError(f"{len(row_ids)} layout row ids for {len(coordinates)} coordinates")

    dataset_ids = {u.use_id for u in dataset.uses}
    layout_ids = set(row_ids)
    missing = sorted(dataset_ids - layout_ids)
    extra = sorted(layout_ids - dataset_ids)
    if missing or extra:
        raise ReconciliationError(
            f"{len(missing)} use(s) lack coordinates, {len(extra)} coordinate row(s) lack uses",
            missing=missing,
            extra=extra,
        )

    palette = dict(palette) if palette is not None else dict(DEFAULT_PALETTE)
    validate_palette(palette)
    narrative = narrative if narrative is not None else DEFAULT_NARRATIVE
    validate_narrative(narrative, dataset_ids)

    position = {row_id: coordinates[i] for i, row_id in enumerate(row_ids)}
    uses = []
    for use in dataset.uses:
        entry = use.to_dict()
        x, y = position[use.use_id]
        entry["x"] = float(x)
        entry["y"] = float(y)
        uses.append(entry)

    return {
        "version": version,
        "generated_at": resolve_timestamp(generated_at),
        "uses": uses,
        "narrative": narrative,
        "facets": AtlasIndex(dataset.uses).facet_counts(),
        "palette": palette,
    }


def write_atlas(path, atlas: dict) -> None:
    write_canonical_json(path, atlas)


def validate_atlas(atlas: dict) -> None:
    """Schema check plus the cross-references the schema cannot express."""
    validate_artifact(atlas, "atlas")
    use_ids = {u["use_id"] for u in atlas["uses"]}
    if len(use_ids) != len(atlas["uses"]):
        raise ValidationError("atlas uses repeat use_ids")
    for position, section in enumerate(atlas["narrative"]):
        unknown = [u for u in section["highlighted_use_ids"] if u not in use_ids]
        if unknown:
            raise ValidationError(
                f"narrative[{position}] highlights unknown use_ids: {unknown}"
            )


def load_atlas(path) -> dict:
    atlas = read_json(path)
    validate_atlas(atlas)
    return atlas


def create_app(atlas: dict, static_dir=None) -> FastAPI:
    """Build the read-only API over one validated, in-memory atlas."""
    validate_atlas(atlas)
    app = FastAPI(title="incident atlas", docs_url=None, redoc_url=None)
    uses = [UseRecord.from_dict(u) for u in atlas["uses"]]
    index = AtlasIndex(uses)
    use_by_id = {u["use_id"]: u for u in atlas["uses"]}

    @app.get("/api/atlas")
    def get_atlas():
        return JSONResponse(atlas)

    @app.get("/api/uses/{use_id}")
    def get_use(use_id: str):
        entry = use_by_id.get(use_id)
        if entry is None:
            return JSONResponse({"error": f"unknown use_id {use_id!r}"}, status_code=404)
        return JSONResponse(entry)

    @app.get("/api/search")
    def get_search(q: str = "", limit: str = "10"):
        try:
            limit_value = int(limit)
        except ValueError:
            return JSONResponse({"error": f"limit must be an integer, got {limit!r}"}, 400)
        try:
            hits = index.search(q, limit_value)
        except InputError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        return JSONResponse({"query": q, "hits": [h.to_dict() for h in hits]})

    @app.get("/api/filter")
    def get_filter(request: Request):
        selections: dict[str, set[str]] = {}
        for facet, value in request.query_params.multi_items():
            selections.setdefault(facet, set()).add(value)
        try:
            matched = index.filter(selections)
        except InputError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        return JSONResponse({"use_ids": sorted(matched)})

    @app.get("/api/facets")
    def get_facets():
        return JSONResponse({"facets": atlas["facets"]})

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="frontend")

    return app


def serve(atlas_path, port: int = 8000, static_dir=None, host: str = "127.0.0.1") -> None:
    """Validate the atlas file and serve it until interrupted."""
    import uvicorn

    atlas = load_atlas(atlas_path)
    app = create_app(atlas, static_dir=static_dir)
    logger.info("serving atlas with %d uses on %s:%d", len(atlas["uses"]), host, port)
    uvicorn.run(app, host=host, port=port, log_level="warning")
