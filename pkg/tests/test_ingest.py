"""Ingest stage: parsing with skip reports, deduplication, keyword and date filters."""

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from incident_atlas.errors import InputError
from incident_atlas.ingest import (
    DEFAULT_KEYWORDS,
    IngestConfig,
    deduplicate,
    filter_date_range,
    filter_mobile,
    normalize_title,
    parse_incidents,
    run_ingest,
)
from incident_atlas.model import IncidentRecord


def entry(incident_id, title="A phone incident", description="An app misbehaved.", **extra):
    d = {"incident_id": incident_id, "title": title, "description": description}
    d.update(extra)
    return d


def record(incident_id, title="A phone incident", description="An app misbehaved.", date=None):
    return IncidentRecord(
        incident_id=incident_id, title=title, description=description, date=date
    )


class TestParseJson:
    def test_top_level_array(self):
        records, skipped = parse_incidents(json.dumps([entry(1), entry(2, title="Other title")]))
        assert [r.incident_id for r in records] == [1, 2]
        assert skipped == []

    def test_object_with_incidents_key(self):
        payload = {"incidents": [entry(5, date="2023-04-01")]}
        records, skipped = parse_incidents(json.dumps(payload))
        assert records[0].incident_id == 5
        assert records[0].date == "2023-04-01"
        assert skipped == []

    def test_accepts_bytes_and_file_objects(self, tmp_path):
        text = json.dumps([entry(1)])
        assert parse_incidents(text.encode("utf-8"))[0][0].incident_id == 1
        p = tmp_path / "dump.json"
        p.write_text(text, encoding="utf-8")
        with open(p, encoding="utf-8") as fh:
            assert parse_incidents(fh)[0][0].incident_id == 1

    def test_invalid_utf8_rejected(self):
        with pytest.raises(InputError, match="UTF-8"):
            parse_incidents(b"\xff\xfe[", format="json")

    def test_invalid_json_rejected(self):
        with pytest.raises(InputError, match="not valid JSON"):
            parse_incidents("{nope")

    def test_wrong_shape_rejected(self):
        with pytest.raises(InputError, match="array"):
            parse_incidents(json.dumps({"rows": []}))

    def test_skip_index_is_zero_based_element_position(self):
        payload = [entry(1), "not an object", entry(2, title="t2"), {"title": "no id"}]
        records, skipped = parse_incidents(json.dumps(payload))
        assert [r.incident_id for r in records] == [1, 2]
        assert [(s.index, s.reason) for s in skipped] == [
            (1, "entry is str, not an object"),
            (3, "missing incident id"),
        ]

    def test_non_integer_id_skipped(self):
        records, skipped = parse_incidents(json.dumps([entry("abc")]))
        assert records == []
        assert skipped[0].index == 0
        assert "not an integer" in skipped[0].reason

    def test_invalid_record_fields_skipped_with_reason(self):
        bad = [
            entry(0),  # non-positive id
            entry(2, title="   "),
            entry(3, date="not-a-date"),
            entry(4, source_urls=["ftp:/broken"]),
        ]
        records, skipped = parse_incidents(json.dumps(bad))
        assert records == []
        reasons = {s.index: s.reason for s in skipped}
        assert "positive integer" in reasons[0]
        assert "title" in reasons[1] or "non-empty" in reasons[1]
        assert "ISO-8601" in reasons[2]
        assert "absolute URL" in reasons[3]

    def test_field_aliases(self):
        payload = [
            {"id": 9, "name": "Aliased", "text": "phone text", "incident_date": "2022-01-05"}
        ]
        records, _ = parse_incidents(json.dumps(payload))
        rec = records[0]
        assert (rec.incident_id, rec.title, rec.description, rec.date) == (
            9,
            "Aliased",
            "phone text",
            "2022-01-05",
        )

    def test_url_string_splitting(self):
        payload = [entry(1, url="https://a.example/x | https://b.example/y")]
        records, _ = parse_incidents(json.dumps(payload))
        assert records[0].source_urls == ("https://a.example/x", "https://b.example/y")

    def test_partition_covers_every_entry(self):
        payload = [entry(1), 42, entry(2, title="t2"), None, {"title": "no id"}]
        records, skipped = parse_incidents(json.dumps(payload))
        assert len(records) + len(skipped) == len(payload)


class TestParseCsv:
    CSV = (
        "incident_id,title,description,date,source_urls\n"
        "1,First phone case,An app broke.,2023-01-02,https://a.example/1\n"
        ",Missing id,desc,,\n"
        "3,Third case,Another app issue.,,\n"
    )

    def test_rows_parse(self):
        records, skipped = parse_incidents(self.CSV, format="csv")
        assert [r.incident_id for r in records] == [1, 3]
        assert records[0].source_urls == ("https://a.example/1",)

    def test_skip_index_is_file_line_number(self):
        _, skipped = parse_incidents(self.CSV, format="csv")
        # header is line 1, so the malformed second data row is file line 3
        assert [(s.index, s.reason) for s in skipped] == [(3, "missing incident id")]

    def test_missing_id_column_is_fatal(self):
        with pytest.raises(InputError, match="id column"):
            parse_incidents("title,description\nT,D\n", format="csv")

    def test_empty_input_rejected(self):
        with pytest.raises(InputError, match="header"):
            parse_incidents("", format="csv")

    def test_unknown_format_rejected(self):
        with pytest.raises(InputError, match="unknown input format"):
            parse_incidents("[]", format="xml")


class TestNormalizeTitle:
    def test_case_punctuation_whitespace(self):
        assert normalize_title("  The  App: FAILED!  ") == "the app failed"
        assert normalize_title("Self-driving car") == "self driving car"

    @given(st.text(max_size=40))
    def test_idempotent(self, title):
        once = normalize_title(title)
        assert normalize_title(once) == once


class TestDeduplicate:
    def test_first_occurrence_kept(self):
        records = [
            record(1, title="Alpha"),
            record(2, title="Beta"),
            record(1, title="Gamma"),  # id dup
            record(3, title="alpha!"),  # title dup after normalization
            record(4, title="Delta"),
        ]
        kept = deduplicate(records)
        assert [r.incident_id for r in kept] == [1, 2, 4]
        assert kept[0].title == "Alpha"

    def test_matches_quadratic_oracle(self):
        records = [
            record(i % 7 + 1, title=f"Title {i % 5}", description=f"phone {i}") for i in range(30)
        ]
        expected = []
        for r in records:
            dup = any(
                r.incident_id == k.incident_id
                or normalize_title(r.title) == normalize_title(k.title)
                for k in expected
            )
            if not dup:
                expected.append(r)
        assert deduplicate(records) == expected

    @given(
        st.lists(
            st.tuples(st.integers(min_value=1, max_value=6), st.sampled_from("abc")),
            max_size=25,
        )
    )
    def test_idempotent_and_duplicate_free(self, pairs):
        records = [record(i, title=f"T {t}", description="d") for i, t in pairs]
        kept = deduplicate(records)
        assert deduplicate(kept) == kept
        ids = [r.incident_id for r in kept]
        titles = [normalize_title(r.title) for r in kept]
        assert len(ids) == len(set(ids))
        assert len(titles) == len(set(titles))


class TestFilterMobile:
    def test_word_mode_ignores_substrings(self):
        records = [
            record(1, title="Desktop case", description="The application crashed on desktops."),
            record(2, title="Handset case", description="The app crashed."),
        ]
        kept = filter_mobile(records, IngestConfig(match_mode="word"))
        assert [r.incident_id for r in kept] == [2]

    def test_substring_mode_matches_inside_words(self):
        records = [record(1, description="The application crashed.")]
        kept = filter_mobile(records, IngestConfig(match_mode="substring"))
        assert [r.incident_id for r in kept] == [1]

    def test_case_insensitive_and_title_counts(self):
        records = [record(1, title="ANDROID outage", description="nothing else")]
        kept = filter_mobile(records)
        assert kept[0].matched_keywords == ("android",)

    def test_matched_keywords_follow_keyword_order(self):
        records = [record(1, description="an android phone app")]
        kept = filter_mobile(records)
        assert kept[0].matched_keywords == ("phone", "app", "android")

    def test_multiword_keyword(self):
        records = [record(1, description="Her fitness tracker leaked location data.")]
        kept = filter_mobile(records, IngestConfig(keyword_list=("fitness tracker",)))
        assert [r.incident_id for r in kept] == [1]

    def test_unmatched_records_dropped(self):
        records = [record(1, title="Industrial robot arm", description="factory floor only")]
        assert filter_mobile(records) == []

    @given(
        st.lists(st.sampled_from(["phone", "robot", "app", "tablet", "drone"]), max_size=6),
        st.integers(min_value=0, max_value=len(DEFAULT_KEYWORDS) - 1),
    )
    def test_adding_a_keyword_never_shrinks_the_result(self, words, extra_idx):
        records = [record(i + 1, description=" ".join(w or "x" for w in [*words, "end"])) for i in range(3)]
        base_keywords = ("phone", "tablet")
        base = filter_mobile(records, IngestConfig(keyword_list=base_keywords))
        widened = filter_mobile(
            records, IngestConfig(keyword_list=base_keywords + (DEFAULT_KEYWORDS[extra_idx],))
        )
        assert {r.incident_id for r in base} <= {r.incident_id for r in widened}


class TestFilterDateRange:
    def test_inclusive_bounds_and_undated_kept(self):
        records = [
            record(1, title="a", date="2023-01-01"),
            record(2, title="b", date="2023-06-30"),
            record(3, title="c", date="2023-07-01"),
            record(4, title="d", date=None),
        ]
        kept = filter_date_range(records, ("2023-01-01", "2023-06-30"))
        assert [r.incident_id for r in kept] == [1, 2, 4]

    def test_none_range_keeps_everything(self):
        records = [record(1, date="1999-01-01")]
        assert filter_date_range(records, None) == records

    def test_inverted_range_rejected(self):
        with pytest.raises(InputError, match="after end"):
            filter_date_range([], ("2024-01-01", "2023-01-01"))


class TestIngestConfig:
    def test_empty_keywords_rejected(self):
        with pytest.raises(InputError, match="keyword list"):
            IngestConfig(keyword_list=()).validate()

    def test_blank_keyword_rejected(self):
        with pytest.raises(InputError, match="non-empty"):
            IngestConfig(keyword_list=("phone", "  ")).validate()

    def test_bad_match_mode_rejected(self):
        with pytest.raises(InputError, match="match_mode"):
            IngestConfig(match_mode="regex").validate()

    def test_from_dict_accepts_legacy_keywords_key(self):
        config = IngestConfig.from_dict({"keywords": ["phone"]})
        assert config.keyword_list == ("phone",)

    def test_from_dict_defaults(self):
        config = IngestConfig.from_dict({})
        assert config.keyword_list == DEFAULT_KEYWORDS
        assert config.match_mode == "word"
        assert config.date_range is None


class TestRunIngest:
    def test_composition_matches_manual_chain(self):
        payload = [
            entry(1, title="Phone A", date="2023-02-01"),
            entry(1, title="Phone A bis"),  # id dup
            entry(2, title="phone a!"),  # title dup
            entry(3, title="Robot arm", description="factory only", date="2023-02-02"),
            entry(4, title="Tablet B", date="2020-01-01"),  # outside range
            "garbage",
        ]
        config = IngestConfig(date_range=("2023-01-01", "2023-12-31"))
        text = json.dumps(payload)
        records, skipped = run_ingest(text, config=config)

        parsed, expected_skipped = parse_incidents(text)
        expected = filter_mobile(
            filter_date_range(deduplicate(parsed), config.date_range), config
        )
        assert records == expected
        assert [r.incident_id for r in records] == [1]
        assert skipped == expected_skipped
        assert len(skipped) == 1
