"""Command-line umbrella for the pipeline stages.

Each subcommand reads and writes JSON artifacts so stages can be run,
inspected, and re-run independently; `pipeline` chains them all from a
single config file. Every command exits 0 on success and 1 on a fatal
input error, with the reason on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import assess, embedding, formatter, ingest, service, tsne
from .errors import AtlasError, InputError
from .jsonio import read_json, write_json
from .model import Dataset, IncidentRecord, UseDraft

logger = logging.getLogger(__name__)


def _read_keywords(path: str) -> tuple[str, ...]:
    """Keyword file: a JSON array, or plain text with one keyword per line."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError:
        return tuple(line.strip() for line in text.splitlines() if line.strip())
    if not isinstance(payload, list):
        raise InputError(f"keyword file {path} must hold a JSON array or plain lines")
    return tuple(str(k) for k in payload)


def _load_incidents_file(path: str) -> list[IncidentRecord]:
    payload = read_json(path)
    entries = payload.get("incidents") if isinstance(payload, dict) else payload
    if not isinstance(entries, list):
        raise InputError(f"{path} must hold an object with an 'incidents' array")
    return [IncidentRecord.from_dict(e) for e in entries]


def cmd_ingest(args) -> int:
    config = ingest.IngestConfig(
        keyword_list=_read_keywords(args.keywords) if args.keywords else ingest.DEFAULT_KEYWORDS,
        match_mode=args.match_mode,
        date_range=(args.date_from, args.date_to) if args.date_from and args.date_to else None,
        input_path=args.input,
    )
    with open(args.input, "rb") as stream:
        records, skipped = ingest.run_ingest(stream, args.format, config)
    write_json(args.out, {"incidents": [r.to_dict() for r in records]})
    write_json(f"{args.out}.skipped.json", {"skipped": [s.to_dict() for s in skipped]})
    print(f"ingest: kept {len(records)} incident(s), skipped {len(skipped)} malformed entr(ies)")
    return 0


def cmd_format(args) -> int:
    incidents = _load_incidents_file(args.input)
    prompt_template = (
        Path(args.prompt_template).read_text(encoding="utf-8")
        if args.prompt_template
        else formatter.DEFAULT_PROMPT_TEMPLATE
    )
    config = formatter.FormatterConfig(
        mode=args.mode,
        cache_path=args.cache,
        endpoint_url=args.endpoint,
        model_name=args.model,
        prompt_template=prompt_template,
    )
    drafts, failures = formatter.format_batch(incidents, config)
    write_json(
        args.out,
        {
            "drafts": [d.to_dict() for d in drafts],
            "incidents": [i.to_dict() for i in incidents],
            "failures": [f.to_dict() for f in failures],
        },
    )
    print(f"format: {len(drafts)} draft(s), {len(failures)} failure(s)")
    return 0


def cmd_assess(args) -> int:
    payload = read_json(args.drafts)
    drafts = [UseDraft.from_dict(d) for d in payload.get("drafts", [])]
    incidents = [IncidentRecord.from_dict(i) for i in payload.get("incidents", [])]
    annotations = assess.load_annotations(read_json(args.annotations))
    dataset = assess.merge_annotations(
        drafts,
        annotations,
        incidents,
        created_at=args.created_at,
        source_snapshot=args.source_snapshot,
    )
    write_json(args.out, dataset.to_dict())
    print(f"assess: merged {len(dataset.uses)} use(s) over {len(dataset.incidents)} incident(s)")
    return 0


def cmd_embed(args) -> int:
    dataset = Dataset.from_dict(read_json(args.dataset))
    config = embedding.EmbeddingConfig(provider=args.provider, external_url=args.endpoint)
    matrix = embedding.embed_uses(dataset.uses, config)
    matrix.validate()
    write_json(args.out, matrix.to_dict())
    print(f"embed: {len(matrix.row_ids)} row(s) x {matrix.dims} dim(s) via {args.provider}")
    return 0


def cmd_layout(args) -> int:
    matrix = embedding.EmbeddingMatrix.from_dict(read_json(args.embeddings))
    config = tsne.TsneConfig(
        perplexity=args.perplexity, iterations=args.iterations, seed=args.seed
    )
    result = tsne.run_tsne(matrix.vectors, matrix.row_ids, config)
    write_json(args.out, result.to_dict())
    final_kl = result.kl_trace[-1] if result.kl_trace else float("nan")
    print(f"layout: {len(result.row_ids)} point(s), final KL {final_kl:.4f}")
    return 0


def cmd_export(args) -> int:
    dataset = Dataset.from_dict(read_json(args.dataset))
    layout = read_json(args.layout)
    narrative = read_json(args.narrative) if args.narrative else None
    if isinstance(narrative, dict):
        narrative = narrative.get("sections")
    palette = read_json(args.palette) if args.palette else None
    atlas = service.export_atlas(
        dataset, layout, narrative=narrative, palette=palette, generated_at=args.generated_at
    )
    service.write_atlas(args.out, atlas)
    print(f"export: atlas with {len(atlas['uses'])} use(s) -> {args.out}")
    return 0


def cmd_serve(args) -> int:
    service.serve(args.atlas, port=args.port, static_dir=args.static, host=args.host)
    return 0


def cmd_pipeline(args) -> int:
    """Run ingest -> format -> assess -> embed -> layout -> export from one config."""
    config_path = Path(args.config)
    config = read_json(config_path)
    base = config_path.parent

    def resolve(value: str) -> str:
        return str((base / value).resolve())

    out_dir = Path(args.out_dir) if args.out_dir else base / config.get("out_dir", "build")
    out_dir.mkdir(parents=True, exist_ok=True)

    ingest_config = ingest.IngestConfig.from_dict(config.get("ingest", {}))
    input_path = resolve(config["input"])
    with open(input_path, "rb") as stream:
        records, skipped = ingest.run_ingest(stream, config.get("format", "json"), ingest_config)
    write_json(out_dir / "incidents.json", {"incidents": [r.to_dict() for r in records]})
    write_json(out_dir / "incidents.json.skipped.json", {"skipped": [s.to_dict() for s in skipped]})
    print(f"pipeline[ingest]: {len(records)} incident(s), {len(skipped)} skipped")

    formatter_settings = dict(config.get("formatter", {}))
    if "cache_path" in formatter_settings:
        formatter_settings["cache_path"] = resolve(formatter_settings["cache_path"])
    formatter_config = formatter.FormatterConfig.from_dict(formatter_settings)
    formatter_config.validate()
    drafts, failures = formatter.format_batch(records, formatter_config)
    write_json(
        out_dir / "drafts.json",
        {
            "drafts": [d.to_dict() for d in drafts],
            "incidents": [i.to_dict() for i in records],
            "failures": [f.to_dict() for f in failures],
        },
    )
    print(f"pipeline[format]: {len(drafts)} draft(s), {len(failures)} failure(s)")

    annotations = assess.load_annotations(read_json(resolve(config["annotations"])))
    created_at = config.get("created_at")
    dataset = assess.merge_annotations(
        drafts,
        annotations,
        records,
        created_at=created_at,
        source_snapshot=config.get("source_snapshot", ""),
    )
    write_json(out_dir / "dataset.json", dataset.to_dict())
    print(f"pipeline[assess]: {len(dataset.uses)} use(s)")

    embedding_config = embedding.EmbeddingConfig.from_dict(config.get("embedding", {}))
    matrix = embedding.embed_uses(dataset.uses, embedding_config)
    matrix.validate()
    write_json(out_dir / "embeddings.json", matrix.to_dict())
    print(f"pipeline[embed]: {len(matrix.row_ids)} row(s) x {matrix.dims} dim(s)")

    tsne_config = tsne.TsneConfig.from_dict(config.get("tsne", {}))
    result = tsne.run_tsne(matrix.vectors, matrix.row_ids, tsne_config)
    write_json(out_dir / "layout.json", result.to_dict())
    final_kl = result.kl_trace[-1] if result.kl_trace else float("nan")
    print(f"pipeline[layout]: final KL {final_kl:.4f}")

    narrative = None
    if config.get("narrative"):
        narrative = read_json(resolve(config["narrative"]))
        if isinstance(narrative, dict):
            narrative = narrative.get("sections")
    atlas = service.export_atlas(
        dataset,
        result,
        narrative=narrative,
        palette=config.get("palette"),
        generated_at=config.get("generated_at", created_at),
    )
    atlas_path = out_dir / "atlas.json"
    service.write_atlas(atlas_path, atlas)
    print(f"pipeline[export]: {atlas_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="atlas",
        description="Build and serve an atlas of AI uses from incident reports.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse, deduplicate, and filter raw incidents")
    p.add_argument("--input", required=True, help="incident dump (JSON or CSV)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--keywords", help="keyword file: JSON array or one term per line")
    p.add_argument("--match-mode", choices=list(ingest.MATCH_MODES), default="word")
    p.add_argument("--date-from", help="inclusive ISO date lower bound")
    p.add_argument("--date-to", help="inclusive ISO date upper bound")
    p.add_argument("--out", required=True, help="output JSON (skip report at <out>.skipped.json)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("format", help="rewrite incidents into five-component drafts")
    p.add_argument("--input", required=True, help="ingested incidents JSON")
    p.add_argument("--mode", choices=list(formatter.MODES), default="replay")
    p.add_argument("--endpoint", help="chat-completion endpoint URL (live mode)")
    p.add_argument("--model", help="model name (live mode)")
    p.add_argument("--cache", required=True, help="response cache path")
    p.add_argument("--prompt-template", help="file holding a custom prompt template")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_format)

    p = sub.add_parser("assess", help="merge human annotations into a dataset")
    p.add_argument("--drafts", required=True, help="drafts JSON from `atlas format`")
    p.add_argument("--annotations", required=True, help="annotation file")
    p.add_argument("--created-at", help="dataset timestamp (default: SOURCE_DATE_EPOCH or now)")
    p.add_argument("--source-snapshot", default="", help="provenance note")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("embed", help="embed uses as unit vectors")
    p.add_argument("--dataset", required=True)
    p.add_argument("--provider", choices=list(embedding.PROVIDERS), default="tfidf")
    p.add_argument("--endpoint", help="embedding endpoint URL (external provider)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("layout", help="map embeddings to 2-D coordinates")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--perplexity", type=float, default=10.0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_layout)

    p = sub.add_parser("export", help="bind dataset + layout into the atlas document")
    p.add_argument("--dataset", required=True)
    p.add_argument("--layout", required=True)
    p.add_argument("--narrative", help="narrative sections JSON (default: built-in copy)")
    p.add_argument("--palette", help="palette JSON (default: built-in colors)")
    p.add_argument("--generated-at", help="timestamp (default: SOURCE_DATE_EPOCH or now)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="serve an atlas file read-only over HTTP")
    p.add_argument("--atlas", required=True)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", help="directory with the frontend bundle")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("pipeline", help="run every stage from one config file")
    p.add_argument("--config", required=True, help="pipeline config JSON")
    p.add_argument("--out-dir", help="override the config's output directory")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except AtlasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
