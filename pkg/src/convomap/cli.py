"""Batch driver over the engine: ingest, analyze, layout, search, ask.

Runs against a local store directory (no HTTP) but shares the store,
locks, and configuration environment with the service, so outputs are
schema-identical to the API's responses.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from .errors import ConvomapError
from .service import Engine, ServiceConfig


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="convomap")
    parser.add_argument("--store", type=Path, help="store directory (env CONVOMAP_STORE)")
    parser.add_argument("--provider", choices=["offline", "remote"], help="provider mode")
    parser.add_argument("--seed", type=int, help="layout seed (env CONVOMAP_SEED)")
    parser.add_argument("--budget", type=int, help="token budget (env CONVOMAP_BUDGET)")
    parser.add_argument("--format", choices=["json", "pretty"], default="json")
    commands = parser.add_subparsers(dest="command", required=True)

    ingest = commands.add_parser("ingest", help="import an export file")
    ingest.add_argument("file", type=Path)

    analyze = commands.add_parser("analyze", help="run the analysis pipeline")
    analyze.add_argument("id")

    layout = commands.add_parser("layout", help="print layout JSON")
    layout.add_argument("id")
    layout_kind = layout.add_subparsers(dest="kind", required=True)
    layout_kind.add_parser("global")
    topic = layout_kind.add_parser("topic")
    topic.add_argument("topic_id")
    topic.add_argument("--mode", choices=["force", "grid"], default="force")
    topic.add_argument("--threshold", type=float, default=None)
    topic.add_argument("--key", choices=["time", "degree", "subtopic"], default="time")
    topic.add_argument("--layout-seed", type=int, default=None)

    search = commands.add_parser("search", help="semantic search over nodes")
    search.add_argument("id")
    search.add_argument("query")
    search.add_argument("--top-k", type=int, default=None)
    search.add_argument("--min-score", type=float, default=None)

    ask = commands.add_parser("ask", help="ask with selected context nodes")
    ask.add_argument("id")
    ask.add_argument("question")
    ask.add_argument("--context", default="", help="comma-separated node ids")

    return parser


def _make_engine(args: argparse.Namespace) -> Engine:
    config = ServiceConfig.from_env()
    if args.store is not None:
        config.store_path = args.store
    if args.provider is not None:
        config.provider = args.provider
    if args.seed is not None:
        config.seed = args.seed
    if args.budget is not None:
        config.token_budget = args.budget
    return Engine(config)


def _emit(payload: dict[str, Any], fmt: str, pretty_lines: list[str] | None = None) -> None:
    if fmt == "json" or pretty_lines is None:
        print(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        for line in pretty_lines:
            print(line)


def run(args: argparse.Namespace) -> int:
    engine = _make_engine(args)

    if args.command == "ingest":
        conv_id = engine.ingest(args.file.read_bytes())
        _emit({"id": conv_id}, args.format, [conv_id])
    elif args.command == "analyze":
        summary = engine.analyze(args.id)
        _emit(
            summary,
            args.format,
            [
                f"analyzed {summary['conversation_id']}: "
                f"{summary['topic_count']} topics, "
                f"{summary['subtopic_count']} subtopics, "
                f"version {summary['analysis_version']}"
            ],
        )
    elif args.command == "layout":
        if args.kind == "global":
            _emit(engine.global_geometry(args.id), args.format)
        else:
            payload = engine.topic_layout(
                args.id,
                args.topic_id,
                mode=args.mode,
                threshold=args.threshold,
                key=args.key,
                seed=args.layout_seed,
            )
            _emit(payload, args.format)
    elif args.command == "search":
        payload = engine.search(args.id, args.query, top_k=args.top_k, min_score=args.min_score)
        lines = [
            f"{hit['node_id']}\t{hit['score']:.4f}\tlevel {hit['highlight_level']}"
            for hit in payload["hits"]
        ] or ["no hits"]
        _emit(payload, args.format, lines)
    elif args.command == "ask":
        context = [part for part in args.context.split(",") if part]
        payload = engine.ask(args.id, args.question, context)
        _emit(payload, args.format, [payload["answer"]])
    else:  # pragma: no cover - argparse enforces the command set
        raise AssertionError(f"unhandled command {args.command!r}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return run(args)
    except ConvomapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
