"""Command-line interface.

Subcommands: ``score`` (gap records per token), ``mine`` (recap-augmented
training records), ``agent`` (one interactive episode over a document),
``eval`` (agent vs. truncation baseline on needle tasks), and
``gen-synthetic`` (seeded task corpora). Settings resolve in order:
built-in defaults, then a ``--config`` YAML file, then explicit flags.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

import yaml

from .agent import AgentConfig, run_agent
from .corpus import write_corpus
from .document import ContextConfig, TokenizedDocument, read_documents
from .lsg import MiningConfig
from .pipeline import EvalConfig, MinePipelineConfig, RetrievalConfig, run_eval, run_mine, run_score
from .providers import build_provider
from .synthetic import (
    NEEDLE_MARKER,
    SyntheticTask,
    generate_planted_repeat,
    generate_synthetic,
)

logger = logging.getLogger(__name__)


def _load_config(path: str | None) -> dict[str, Any]:
    if not path:
        return {}
    data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise SystemExit(f"config file {path} must hold a mapping")
    return data


class Settings:
    """Flag > config-file > default resolution for one subcommand run."""

    def __init__(self, args: argparse.Namespace, config: dict[str, Any]) -> None:
        self._args = args
        self._config = config

    def get(self, name: str, default: Any = None) -> Any:
        flag = getattr(self._args, name, None)
        if flag is not None:
            return flag
        if name in self._config:
            return self._config[name]
        return default

    def provider_options(self, key: str) -> dict[str, Any]:
        options = self._config.get(key, {})
        if not isinstance(options, dict):
            raise SystemExit(f"config key {key!r} must hold a mapping")
        return dict(options)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML config file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v info, -vv debug"
    )


def _add_scoring(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--provider", default=None, help="scoring provider name")
    parser.add_argument("--short-window", type=int, default=None)
    parser.add_argument("--long-window", type=int, default=None)
    parser.add_argument("--min-position", type=int, default=None)
    parser.add_argument("--stride", type=int, default=None)
    parser.add_argument("--top-k", type=int, default=None)
    parser.add_argument("--suppression-radius", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recap",
        description="Mine recap-augmented corpora and run the recap agent.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="emit per-token gap records")
    p_score.add_argument("--input", required=True)
    p_score.add_argument("--output", help="JSONL output (default stdout)")
    _add_scoring(p_score)
    _add_common(p_score)

    p_mine = sub.add_parser("mine", help="build recap-augmented training records")
    p_mine.add_argument("--input", required=True)
    p_mine.add_argument("--output", help="JSONL output (default stdout)")
    p_mine.add_argument("--report", help="write the run report JSON here")
    p_mine.add_argument(
        "--dry-run",
        action="store_true",
        help="emit segment selections without any generation calls",
    )
    p_mine.add_argument("--generation-provider", default=None)
    p_mine.add_argument("--window-size", type=int, default=None)
    p_mine.add_argument("--step-size", type=int, default=None)
    p_mine.add_argument("--templates", default=None, help="template override directory")
    _add_scoring(p_mine)
    _add_common(p_mine)

    p_agent = sub.add_parser("agent", help="run one recap-agent episode")
    p_agent.add_argument("--input", required=True, help="plain-text document")
    p_agent.add_argument("--question", required=True)
    p_agent.add_argument("--output", help="transcript JSON (default stdout)")
    p_agent.add_argument("--provider", default=None, help="generation provider name")
    p_agent.add_argument("--n-chunks", type=int, default=None)
    p_agent.add_argument("--chunk-tokens", type=int, default=None)
    p_agent.add_argument("--recap-budget", type=int, default=None)
    p_agent.add_argument("--recap-max-new-tokens", type=int, default=None)
    p_agent.add_argument("--templates", default=None)
    _add_common(p_agent)

    p_eval = sub.add_parser("eval", help="recap agent vs. truncation baseline")
    p_eval.add_argument("--suite", help="task JSONL (default: generate tasks)")
    p_eval.add_argument("--tasks", type=int, default=None, help="tasks to generate")
    p_eval.add_argument("--length-tokens", type=int, default=None)
    p_eval.add_argument("--needle-position", type=float, default=None)
    p_eval.add_argument("--n-chunks", default=None, help="comma-separated grid")
    p_eval.add_argument("--provider", default=None, help="generation provider name")
    p_eval.add_argument("--recap-budget", type=int, default=None)
    p_eval.add_argument("--baseline-tokens", type=int, default=None)
    p_eval.add_argument("--output", help="report JSON (default stdout)")
    _add_common(p_eval)

    p_gen = sub.add_parser("gen-synthetic", help="emit a seeded synthetic corpus")
    p_gen.add_argument("--count", type=int, default=None)
    p_gen.add_argument("--length-tokens", type=int, default=None)
    p_gen.add_argument("--needle-position", type=float, default=None)
    p_gen.add_argument(
        "--kind", choices=("needle", "planted"), default=None,
        help="needle-recall tasks or planted-repeat documents",
    )
    p_gen.add_argument("--short-window", type=int, default=None)
    p_gen.add_argument("--output", help="JSONL output (default stdout)")
    _add_common(p_gen)

    return parser


def _emit_lines(rows: Sequence[dict], output: str | None) -> None:
    lines = "".join(json.dumps(row, ensure_ascii=False) + "\n" for row in rows)
    if output:
        Path(output).write_text(lines, encoding="utf-8")
    else:
        sys.stdout.write(lines)


def _emit_json(obj: dict, output: str | None) -> None:
    text = json.dumps(obj, ensure_ascii=False, indent=2) + "\n"
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _mining_config(settings: Settings) -> MiningConfig:
    context = ContextConfig(
        short_window=settings.get("short_window", 512),
        long_window=settings.get("long_window"),
    )
    return MiningConfig(
        top_k=settings.get("top_k", 8),
        context=context,
        min_position=settings.get("min_position"),
        stride=settings.get("stride", 1),
        suppression_radius=settings.get("suppression_radius"),
    )


def _scoring_provider(settings: Settings):
    name = settings.get("provider", "oracle")
    return build_provider(name, **settings.provider_options("provider_options"))


def _generation_provider(settings: Settings, default: str):
    """Build a generation provider; the bundled doubles default to the
    synthetic needle marker so generated suites work out of the box."""
    name = settings.get("provider", default)
    options = settings.provider_options("provider_options")
    if name in ("extractive", "lossy"):
        options.setdefault("marker", NEEDLE_MARKER)
    if name == "lossy":
        options.setdefault("seed", settings.get("seed", 0))
    return build_provider(name, **options)


def _cmd_score(args: argparse.Namespace) -> int:
    settings = Settings(args, _load_config(args.config))
    provider = _scoring_provider(settings)
    documents = list(read_documents(args.input))
    report = run_score(
        provider, documents, _mining_config(settings), settings.get("workers", 1)
    )
    _emit_lines(report["records"], args.output)
    for failure in report["failures"]:
        logger.error("document %s failed: %s", failure["doc_id"], failure["error"])
    return 1 if report["failures"] else 0


def _cmd_mine(args: argparse.Namespace) -> int:
    settings = Settings(args, _load_config(args.config))
    scoring = _scoring_provider(settings)
    generation_name = settings.get("generation_provider", "extractive")
    generation = build_provider(
        generation_name, **settings.provider_options("generation_provider_options")
    )
    cfg = MinePipelineConfig(
        mining=_mining_config(settings),
        retrieval=RetrievalConfig(
            window_size=settings.get("window_size", 128),
            step_size=settings.get("step_size", 64),
        ),
        refine_max_new_tokens=settings.get("refine_max_new_tokens", 192),
        workers=settings.get("workers", 1),
        dry_run=bool(args.dry_run),
        templates_dir=settings.get("templates"),
    )
    documents = list(read_documents(args.input))
    result = run_mine(scoring, generation, documents, cfg)
    if cfg.dry_run:
        _emit_lines(result["selections"], args.output)
    elif args.output:
        write_corpus(result["records"], args.output)
    else:
        _emit_lines([r.as_dict() for r in result["records"]], None)
    report = {
        "documents": result["documents"],
        "records": len(result["records"]),
        "selections": len(result["selections"]),
        "pass_through": result["pass_through"],
        "failures": result["failures"],
    }
    if args.report:
        _emit_json(report, args.report)
    for failure in result["failures"]:
        logger.error("document %s failed: %s", failure["doc_id"], failure["error"])
    return 1 if result["failures"] else 0


def _cmd_agent(args: argparse.Namespace) -> int:
    settings = Settings(args, _load_config(args.config))
    provider = _generation_provider(settings, default="extractive")
    n_chunks = settings.get("n_chunks")
    chunk_tokens = settings.get("chunk_tokens")
    if n_chunks is None and chunk_tokens is None:
        n_chunks = 5
    cfg = AgentConfig(
        n_chunks=n_chunks,
        chunk_tokens=chunk_tokens,
        recap_budget=settings.get("recap_budget", 512),
        recap_max_new_tokens=settings.get("recap_max_new_tokens", 64),
        answer_max_new_tokens=settings.get("answer_max_new_tokens", 128),
        compaction_fraction=settings.get("compaction_fraction", 0.5),
    )
    documents = list(read_documents(args.input))
    if not documents:
        raise ValueError(f"no documents found in {args.input}")
    if len(documents) > 1:
        logger.warning(
            "input holds %d documents; running the first (%s)",
            len(documents),
            documents[0][0],
        )
    doc_id, text = documents[0]
    doc = TokenizedDocument.from_text(text, provider, doc_id)
    transcript = run_agent(provider, doc, args.question, cfg)
    _emit_json(transcript, args.output)
    return 0


def _parse_grid(raw: Any, default: tuple[int, ...]) -> tuple[int, ...]:
    if raw is None:
        return default
    if isinstance(raw, (list, tuple)):
        return tuple(int(v) for v in raw)
    return tuple(int(part) for part in str(raw).split(",") if part.strip())


def _cmd_eval(args: argparse.Namespace) -> int:
    settings = Settings(args, _load_config(args.config))
    seed = settings.get("seed", 0)
    provider = _generation_provider(settings, default="lossy")
    if args.suite:
        tasks = []
        field_names = {f.name for f in dataclasses.fields(SyntheticTask)}
        with Path(args.suite).open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    obj = json.loads(line)
                    tasks.append(
                        SyntheticTask(
                            **{k: v for k, v in obj.items() if k in field_names}
                        )
                    )
    else:
        count = settings.get("tasks", 10)
        tasks = [
            generate_synthetic(
                seed + i,
                length_tokens=settings.get("length_tokens", 600),
                needle_position=settings.get("needle_position", 0.35),
            )
            for i in range(count)
        ]
    cfg = EvalConfig(
        n_chunks_grid=_parse_grid(settings.get("n_chunks"), (3, 5, 10)),
        recap_budget=settings.get("recap_budget", 512),
        recap_max_new_tokens=settings.get("recap_max_new_tokens", 64),
        answer_max_new_tokens=settings.get("answer_max_new_tokens", 128),
        compaction_fraction=settings.get("compaction_fraction", 0.5),
        baseline_tokens=settings.get("baseline_tokens", 256),
        workers=settings.get("workers", 1),
    )
    report = run_eval(provider, tasks, cfg)
    _emit_json(report, args.output)
    return 0


def _cmd_gen_synthetic(args: argparse.Namespace) -> int:
    settings = Settings(args, _load_config(args.config))
    seed = settings.get("seed", 0)
    count = settings.get("count", 10)
    kind = settings.get("kind", "needle")
    rows: list[dict] = []
    for i in range(count):
        if kind == "planted":
            doc = generate_planted_repeat(
                seed + i, short_window=settings.get("short_window", 16)
            )
            row = dataclasses.asdict(doc)
            row["id"] = doc.doc_id
        else:
            task = generate_synthetic(
                seed + i,
                length_tokens=settings.get("length_tokens", 400),
                needle_position=settings.get("needle_position", 0.5),
            )
            row = dataclasses.asdict(task)
            row["id"] = task.doc_id
            row["text"] = task.document
        rows.append(row)
    _emit_lines(rows, args.output)
    return 0


_COMMANDS = {
    "score": _cmd_score,
    "mine": _cmd_mine,
    "agent": _cmd_agent,
    "eval": _cmd_eval,
    "gen-synthetic": _cmd_gen_synthetic,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING
    if args.verbose == 1:
        level = logging.INFO
    elif args.verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"recap: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
