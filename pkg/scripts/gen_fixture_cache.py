"""Regenerate the bundled formatter replay cache.

The response texts below are authored by hand; this script only computes
their cache keys (which depend on the default prompt template) and writes
tests/fixtures/pipeline/cache.json. Re-run after changing the default
prompt template or the fixture responses:

    python3 scripts/gen_fixture_cache.py
"""

from __future__ import annotations

import json
from pathlib import Path

from incident_atlas.formatter import DEFAULT_PROMPT_TEMPLATE, request_key

RESPONSES = {
    264: (
        "Domain: Law enforcement\n"
        "Purpose: Documenting and reporting traffic violations from video data\n"
        "Capability: Estimating vehicle speed from video data\n"
        "AI user: mobile app users\n"
        "AI subject: drivers\n"
    ),
    301: (
        "Domain: Social media\n"
        "Purpose: Keeping viewers engaged with a personalized short-video feed\n"
        "Capability: Ranking short videos by predicted engagement\n"
        "AI user: social media platforms\n"
        "AI subject: app users\n"
    ),
    12: (
        "Domain: Healthcare\n"
        "Purpose: Monitoring heart rhythm continuously outside clinical settings\n"
        "Capability: Detecting irregular heart rhythms from wearable sensor data\n"
        "AI user: consumers\n"
        "AI subject: patients\n"
    ),
    45: (
        "Domain: Financial services\n"
        "Purpose: Screening consumer loan applications without credit bureau records\n"
        "Capability: Scoring creditworthiness from smartphone usage metadata\n"
        "AI user: lenders\n"
        "AI subject: loan applicants\n"
    ),
    78: (
        "Domain: Education\n"
        "Purpose: Coaching language learners on pronunciation\n"
        "Capability: Scoring spoken pronunciation against reference audio\n"
        "AI user: students\n"
        "AI subject: students\n"
    ),
    102: (
        "Domain: Consumer software\n"
        "Purpose: Letting households control appliances and shopping by voice\n"
        "Capability: Interpreting spoken commands and placing orders\n"
        "AI user: homeowners\n"
        "AI subject: household members\n"
    ),
    133: (
        "Domain: Public administration\n"
        "Purpose: Allocating municipal services according to computed citizen scores\n"
        "Capability: Ranking residents by aggregated behavioral data\n"
        "AI user: government agencies\n"
        "AI subject: residents\n"
    ),
    150: (
        "Domain: Gaming\n"
        "Purpose: Maximizing in-game purchases by children\n"
        "Capability: Timing purchase prompts to moments of low self-control\n"
        "AI user: game developers\n"
        "AI subject: children\n"
    ),
    187: (
        "Domain: Insurance\n"
        "Purpose: Pricing health insurance premiums from lifestyle data\n"
        "Capability: Inferring health risk from activity and sleep patterns\n"
        "AI user: Insurers\n"
        "AI subject: policyholders\n"
    ),
    205: (
        "Domain: Entertainment\n"
        "Purpose: Recommending music matched to listening history\n"
        "Capability: Predicting listener preferences from play history\n"
        "AI user: streaming services\n"
        "AI subject: listeners\n"
    ),
    233: (
        "Domain: Transportation\n"
        "Purpose: Routing drivers around congestion in real time\n"
        "Capability: Forecasting travel time across road networks\n"
        "AI user: commuters\n"
        "AI subject: drivers\n"
    ),
    250: (
        "Domain: Consumer software\n"
        "Purpose: Organizing personal photo libraries automatically\n"
        "Capability: Recognizing faces and scenes in personal photos\n"
        "AI user: consumers\n"
        "AI subject: app users\n"
    ),
}


def main() -> None:
    entries = {
        request_key(incident_id, DEFAULT_PROMPT_TEMPLATE): text
        for incident_id, text in RESPONSES.items()
    }
    out = Path(__file__).resolve().parent.parent / "tests/fixtures/pipeline/cache.json"
    out.write_text(
        json.dumps({"entries": entries}, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    print(f"wrote {len(entries)} cache entries to {out}")


if __name__ == "__main__":
    main()
