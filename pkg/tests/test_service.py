"""Atlas export and the read-only HTTP API."""

import json

import pytest
from fastapi.testclient import TestClient

from incident_atlas.errors import InputError, ReconciliationError, ValidationError
from incident_atlas.model import Dataset, RiskTier, SdgDirection, SdgImpact, UseRecord
from incident_atlas.service import (
    DEFAULT_NARRATIVE,
    DEFAULT_PALETTE,
    contrast_vs_white,
    create_app,
    export_atlas,
    load_atlas,
    relative_luminance,
    validate_atlas,
    validate_narrative,
    validate_palette,
    write_atlas,
)

GENERATED_AT = "2024-03-15T00:00:00Z"


def speedcam_use():
    return UseRecord(
        use_id="use-264-speedcam",
        incident_ids=(264,),
        domain="law enforcement",
        purpose="documenting and reporting traffic violations from video data",
        capability="Estimating vehicle speed from video data",
        ai_user="mobile app users",
        ai_subject="drivers",
        risk=RiskTier.HIGH,
        sdg_impacts=(SdgImpact(11, SdgDirection.SUPPORTS, ("safer streets",)),),
        incident_examples=("wrong speed readings led to disputed fines",),
    )


def triage_use():
    return UseRecord(
        use_id="use-301-triage",
        incident_ids=(301,),
        domain="healthcare",
        purpose="prioritizing emergency calls",
        capability="ranking symptom descriptions",
        ai_user="dispatch nurses",
        ai_subject="callers",
        risk=RiskTier.UNACCEPTABLE,
        sdg_impacts=(SdgImpact(3, SdgDirection.UNDERMINES, ("delayed responses",)),),
        incident_examples=("a stroke caller was ranked low priority",),
    )


def tutor_use():
    return UseRecord(
        use_id="use-045-tutor",
        incident_ids=(45,),
        domain="education",
        purpose="drilling vocabulary on tablets",
        capability="scheduling spaced repetition",
        ai_user="teachers",
        ai_subject="students",
        risk=RiskTier.LOW,
        incident_examples=("the app leaked progress reports",),
    )


def small_dataset():
    uses = [speedcam_use(), triage_use(), tutor_use()]
    incidents = []
    for use in uses:
        for n in use.incident_ids:
            incidents.append(
                {
                    "incident_id": n,
                    "title": f"Incident {n}",
                    "description": f"Reported case number {n}.",
                }
            )
    return Dataset.from_dict(
        {
            "uses": [u.to_dict() for u in uses],
            "incidents": incidents,
            "created_at": GENERATED_AT,
            "source_snapshot": "three-use service fixture",
        }
    )


def layout_for(dataset):
    ids = [u.use_id for u in dataset.uses]
    spots = [[0.0, 0.0], [1.0, 0.25], [0.5, 1.0]]
    return {
        "row_ids": ids,
        "coordinates": spots[: len(ids)],
        "kl_trace": [1.0, 0.4],
        "config": {"seed": 0},
    }


@pytest.fixture(scope="module")
def atlas():
    dataset = small_dataset()
    return export_atlas(dataset, layout_for(dataset), generated_at=GENERATED_AT)


@pytest.fixture(scope="module")
def client(atlas):
    return TestClient(create_app(atlas))


class TestColorMath:
    def test_luminance_extremes(self):
        assert abs(relative_luminance("#ffffff") - 1.0) < 1e-9
        assert abs(relative_luminance("#000000")) < 1e-9

    def test_default_palette_contrast_values(self):
        # frozen from the sRGB linearization worked by hand
        assert abs(contrast_vs_white(DEFAULT_PALETTE["unacceptable"]) - 4.9598) < 1e-3
        assert abs(contrast_vs_white(DEFAULT_PALETTE["high"]) - 3.1949) < 1e-3
        assert abs(contrast_vs_white(DEFAULT_PALETTE["low"]) - 3.5141) < 1e-3

    def test_default_palette_valid(self):
        validate_palette(DEFAULT_PALETTE)

    def test_low_contrast_color_rejected(self):
        palette = dict(DEFAULT_PALETTE, high="#ffff00")  # ~1.07:1 against white
        with pytest.raises(InputError, match="contrast"):
            validate_palette(palette)

    def test_wrong_keys_rejected(self):
        with pytest.raises(InputError, match="palette keys"):
            validate_palette({"low": "#1b998b"})

    def test_bad_hex_rejected(self):
        palette = dict(DEFAULT_PALETTE, low="teal")
        with pytest.raises(InputError, match="#rrggbb"):
            validate_palette(palette)


class TestNarrativeValidation:
    def test_default_narrative_valid(self):
        validate_narrative(DEFAULT_NARRATIVE, set())

    def test_wrong_section_count(self):
        with pytest.raises(InputError, match="exactly 4"):
            validate_narrative(DEFAULT_NARRATIVE[:3], set())

    def test_blank_field(self):
        sections = json.loads(json.dumps(DEFAULT_NARRATIVE))
        sections[1]["title"] = "  "
        with pytest.raises(InputError, match=r"narrative\[1\].title"):
            validate_narrative(sections, set())

    def test_repeated_id(self):
        sections = json.loads(json.dumps(DEFAULT_NARRATIVE))
        sections[2]["id"] = sections[0]["id"]
        with pytest.raises(InputError, match="repeats"):
            validate_narrative(sections, set())

    def test_unknown_highlight(self):
        sections = json.loads(json.dumps(DEFAULT_NARRATIVE))
        sections[0]["highlighted_use_ids"] = ["use-999"]
        with pytest.raises(InputError, match="unknown use_ids"):
            validate_narrative(sections, {"use-001"})


class TestExportAtlas:
    def test_document_shape(self, atlas):
        assert atlas["version"] == "1"
        assert atlas["generated_at"] == GENERATED_AT
        assert [u["use_id"] for u in atlas["uses"]] == [
            "use-264-speedcam",
            "use-301-triage",
            "use-045-tutor",
        ]
        assert atlas["uses"][0]["x"] == 0.0 and atlas["uses"][0]["y"] == 0.0
        assert atlas["uses"][2]["x"] == 0.5 and atlas["uses"][2]["y"] == 1.0
        assert len(atlas["narrative"]) == 4
        assert set(atlas["facets"]) == {"domain", "ai_user", "ai_subject", "risk", "sdg"}
        assert atlas["facets"]["risk"] == {"high": 1, "unacceptable": 1, "low": 1}
        assert atlas["palette"] == DEFAULT_PALETTE

    def test_passes_own_validation(self, atlas):
        validate_atlas(atlas)

    def test_layout_missing_use_rejected(self):
        dataset = small_dataset()
        layout = layout_for(dataset)
        layout["row_ids"] = layout["row_ids"][:2]
        layout["coordinates"] = layout["coordinates"][:2]
        with pytest.raises(ReconciliationError) as info:
            export_atlas(dataset, layout, generated_at=GENERATED_AT)
        assert info.value.missing == ["use-045-tutor"]

    def test_layout_extra_row_rejected(self):
        dataset = small_dataset()
        layout = layout_for(dataset)
        layout["row_ids"].append("use-999")
        layout["coordinates"].append([0.1, 0.1])
        with pytest.raises(ReconciliationError) as info:
            export_atlas(dataset, layout, generated_at=GENERATED_AT)
        assert info.value.extra == ["use-999"]

    def test_row_coordinate_count_mismatch(self):
        dataset = small_dataset()
        layout = layout_for(dataset)
        layout["coordinates"] = layout["coordinates"][:2]
        with pytest.raises(InputError, match="coordinates"):
            export_atlas(dataset, layout, generated_at=GENERATED_AT)

    def test_invalid_dataset_rejected(self):
        dataset = small_dataset()
        broken = Dataset(
            uses=[u for u in dataset.uses],
            incidents=[],  # all references dangle
            created_at=GENERATED_AT,
        )
        with pytest.raises(ValidationError):
            export_atlas(broken, layout_for(dataset), generated_at=GENERATED_AT)

    def test_written_file_round_trips_and_is_byte_stable(self, atlas, tmp_path):
        one, two = tmp_path / "one.json", tmp_path / "two.json"
        write_atlas(one, atlas)
        write_atlas(two, atlas)
        assert one.read_bytes() == two.read_bytes()
        assert load_atlas(one)["uses"][0]["use_id"] == "use-264-speedcam"

    def test_rebuilt_export_identical(self, atlas, tmp_path):
        dataset = small_dataset()
        again = export_atlas(dataset, layout_for(dataset), generated_at=GENERATED_AT)
        one, two = tmp_path / "one.json", tmp_path / "two.json"
        write_atlas(one, atlas)
        write_atlas(two, again)
        assert one.read_bytes() == two.read_bytes()


class TestValidateAtlas:
    def test_missing_coordinate_rejected(self, atlas):
        corrupted = json.loads(json.dumps(atlas))
        del corrupted["uses"][0]["x"]
        with pytest.raises(ValidationError):
            validate_atlas(corrupted)

    def test_out_of_range_coordinate_rejected(self, atlas):
        corrupted = json.loads(json.dumps(atlas))
        corrupted["uses"][0]["x"] = 1.5
        with pytest.raises(ValidationError):
            validate_atlas(corrupted)

    def test_duplicate_use_ids_rejected(self, atlas):
        corrupted = json.loads(json.dumps(atlas))
        corrupted["uses"][1]["use_id"] = corrupted["uses"][0]["use_id"]
        with pytest.raises(ValidationError, match="repeat"):
            validate_atlas(corrupted)

    def test_dangling_highlight_rejected(self, atlas):
        corrupted = json.loads(json.dumps(atlas))
        corrupted["narrative"][0]["highlighted_use_ids"] = ["use-nowhere"]
        with pytest.raises(ValidationError, match="unknown use_ids"):
            validate_atlas(corrupted)

    def test_create_app_refuses_corrupted_atlas(self, atlas):
        corrupted = json.loads(json.dumps(atlas))
        corrupted["palette"] = {}
        with pytest.raises(ValidationError):
            create_app(corrupted)


class TestApi:
    def test_get_atlas_returns_whole_document(self, client, atlas):
        response = client.get("/api/atlas")
        assert response.status_code == 200
        assert response.json() == atlas

    def test_get_known_use(self, client):
        response = client.get("/api/uses/use-264-speedcam")
        assert response.status_code == 200
        body = response.json()
        assert body["capability"] == "Estimating vehicle speed from video data"
        assert body["ai_user"] == "mobile app users"
        assert 0.0 <= body["x"] <= 1.0 and 0.0 <= body["y"] <= 1.0

    def test_get_unknown_use_404_json(self, client):
        response = client.get("/api/uses/use-000-nothing")
        assert response.status_code == 404
        assert "unknown use_id" in response.json()["error"]

    def test_search_ranks_and_reports_terms(self, client):
        response = client.get("/api/search", params={"q": "vehicle speed video"})
        assert response.status_code == 200
        body = response.json()
        assert body["query"] == "vehicle speed video"
        assert body["hits"][0]["use_id"] == "use-264-speedcam"
        assert "speed" in body["hits"][0]["matched_terms"]

    def test_search_empty_query_no_hits(self, client):
        assert client.get("/api/search").json()["hits"] == []

    def test_search_limit_respected(self, client):
        response = client.get("/api/search", params={"q": "use of ai", "limit": "1"})
        assert len(response.json()["hits"]) <= 1

    def test_search_non_integer_limit_400(self, client):
        response = client.get("/api/search", params={"q": "speed", "limit": "ten"})
        assert response.status_code == 400
        assert "limit" in response.json()["error"]

    def test_search_non_positive_limit_400(self, client):
        response = client.get("/api/search", params={"q": "speed", "limit": "0"})
        assert response.status_code == 400

    def test_filter_or_within_facet(self, client):
        response = client.get("/api/filter?risk=high&risk=low")
        assert response.status_code == 200
        assert response.json()["use_ids"] == ["use-045-tutor", "use-264-speedcam"]

    def test_filter_and_across_facets(self, client):
        response = client.get("/api/filter?risk=high&domain=law enforcement")
        assert response.json()["use_ids"] == ["use-264-speedcam"]
        response = client.get("/api/filter?risk=low&domain=law enforcement")
        assert response.json()["use_ids"] == []

    def test_filter_sdg_by_goal_number(self, client):
        response = client.get("/api/filter", params={"sdg": "3"})
        assert response.json()["use_ids"] == ["use-301-triage"]

    def test_filter_no_params_returns_all(self, client):
        response = client.get("/api/filter")
        assert response.json()["use_ids"] == [
            "use-045-tutor",
            "use-264-speedcam",
            "use-301-triage",
        ]

    def test_filter_unknown_facet_400(self, client):
        response = client.get("/api/filter", params={"vibe": "chill"})
        assert response.status_code == 400
        assert "unknown facet" in response.json()["error"]

    def test_facets_endpoint(self, client, atlas):
        assert client.get("/api/facets").json() == {"facets": atlas["facets"]}

    def test_identical_gets_identical_bodies(self, client):
        for path in ("/api/atlas", "/api/facets", "/api/search?q=speed", "/api/filter?risk=low"):
            first = client.get(path)
            second = client.get(path)
            assert first.content == second.content

    def test_api_complete_without_frontend(self, client):
        # no static mount: the root path has no handler but the API answers
        assert client.get("/").status_code == 404
        assert client.get("/api/atlas").status_code == 200


class TestStaticMount:
    def test_frontend_served_when_mounted(self, atlas, tmp_path):
        static = tmp_path / "dist"
        static.mkdir()
        (static / "index.html").write_text("<!doctype html><title>atlas</title>", encoding="utf-8")
        client = TestClient(create_app(atlas, static_dir=str(static)))
        response = client.get("/")
        assert response.status_code == 200
        assert "atlas" in response.text
        # API routes take precedence over the mount
        assert client.get("/api/facets").status_code == 200
