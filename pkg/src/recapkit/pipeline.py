"""End-to-end runs: score documents, mine recap-augmented training records,
and evaluate the recap agent against a truncation baseline.

Documents fan out across a thread pool and results merge back in input
order, so reports and written corpora are byte-identical for any worker
count. Per-document failures are recorded and skipped, never fatal to the
run; callers decide the exit code from the report.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .agent import AgentConfig, run_agent
from .corpus import (
    CorpusRecord,
    RecapEntry,
    build_training_sequence,
    load_template,
    refine_segment,
)
from .document import TokenizedDocument
from .errors import EmptyRemotePrefix, GenerationEmpty, NoImprovingSegment, NoKeyTokens
from .lsg import MiningConfig, score_positions, select_key_tokens
from .providers.base import GenerationRequest, LmProvider
from .retrieval import RetrievalConfig, SegmentSelection, best_segment
from .synthetic import SyntheticTask

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MinePipelineConfig:
    mining: MiningConfig
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    refine_max_new_tokens: int = 192
    workers: int = 1
    dry_run: bool = False
    templates_dir: str | None = None

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class EvalConfig:
    n_chunks_grid: tuple[int, ...] = (3, 5, 10)
    recap_budget: int = 512
    recap_max_new_tokens: int = 64
    answer_max_new_tokens: int = 128
    compaction_fraction: float = 0.5
    baseline_tokens: int = 256
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.n_chunks_grid:
            raise ValueError("n_chunks_grid must be non-empty")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def _map_ordered(fn, items: Sequence, workers: int) -> list:
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def selection_record(doc_id: str, selection: SegmentSelection, insertion_position: int) -> dict:
    return {
        "doc_id": doc_id,
        "key_position": selection.key.position,
        "key_token": selection.key.token,
        "log_gap": selection.key.log_gap,
        "segment_start": selection.segment.start,
        "segment_end": selection.segment.end,
        "insertion_position": insertion_position,
        "baseline_logprob": selection.baseline_logprob,
        "segment_logprob": selection.segment_logprob,
    }


def run_score(
    provider: LmProvider,
    documents: Iterable[tuple[str, str]],
    cfg: MiningConfig,
    workers: int = 1,
) -> dict:
    """Gap records for every scanned position of every document."""

    def one(item: tuple[str, str]) -> dict:
        doc_id, text = item
        try:
            doc = TokenizedDocument.from_text(text, provider, doc_id)
            records = [
                {
                    "doc_id": doc_id,
                    "position": r.position,
                    "token": r.token,
                    "log_gap": r.log_gap,
                }
                for r in score_positions(provider, doc, cfg)
            ]
            return {"doc_id": doc_id, "status": "ok", "records": records}
        except Exception as exc:  # recorded, not fatal to the run
            logger.exception("scoring failed for %s", doc_id)
            return {
                "doc_id": doc_id,
                "status": "error",
                "error": f"{type(exc).__name__}: {exc}",
            }

    results = _map_ordered(one, list(documents), workers)
    records = [rec for r in results if r["status"] == "ok" for rec in r["records"]]
    failures = [
        {"doc_id": r["doc_id"], "error": r["error"]}
        for r in results
        if r["status"] == "error"
    ]
    return {
        "records": records,
        "failures": failures,
        "documents": len(results),
    }


def mine_document(
    scoring_provider: LmProvider,
    generation_provider: LmProvider,
    doc_id: str,
    text: str,
    cfg: MinePipelineConfig,
    refine_template: str | None = None,
) -> dict:
    """Mine one document into a training record (or selection records when
    dry-running). Documents with no key tokens pass through unchanged."""
    doc = TokenizedDocument.from_text(text, scoring_provider, doc_id)
    try:
        keys = select_key_tokens(scoring_provider, doc, cfg.mining)
    except NoKeyTokens:
        record = build_training_sequence(doc, [])
        return {
            "doc_id": doc_id,
            "status": "no_key_tokens",
            "record": record,
            "selections": [],
        }
    selections: list[tuple[SegmentSelection, int]] = []
    for key in keys:
        try:
            selection = best_segment(
                scoring_provider, doc, key, cfg.retrieval, cfg.mining.context
            )
        except (NoImprovingSegment, EmptyRemotePrefix) as exc:
            logger.info("key at %d in %s skipped: %s", key.position, doc_id, exc)
            continue
        insertion = doc.sentence_start_at_or_before(key.position)
        selections.append((selection, insertion))
    deduped: dict[tuple[int, int, int], tuple[SegmentSelection, int]] = {}
    for selection, insertion in selections:
        dedupe_key = (insertion, selection.segment.start, selection.segment.end)
        incumbent = deduped.get(dedupe_key)
        if incumbent is None or selection.key.log_gap > incumbent[0].key.log_gap:
            deduped[dedupe_key] = (selection, insertion)
    ordered = sorted(deduped.values(), key=lambda pair: (pair[1], pair[0].segment.start))
    selection_records = [
        selection_record(doc_id, sel, ins) for sel, ins in ordered
    ]
    if cfg.dry_run:
        return {
            "doc_id": doc_id,
            "status": "ok",
            "record": None,
            "selections": selection_records,
        }
    if refine_template is None:
        refine_template = load_template("refine_v1", cfg.templates_dir)
    entries = [
        RecapEntry.from_selection(
            sel,
            refine_segment(
                generation_provider,
                sel.segment.text,
                refine_template,
                max_new_tokens=cfg.refine_max_new_tokens,
            ),
            ins,
        )
        for sel, ins in ordered
    ]
    record = build_training_sequence(doc, entries)
    return {
        "doc_id": doc_id,
        "status": "ok",
        "record": record,
        "selections": selection_records,
    }


def run_mine(
    scoring_provider: LmProvider,
    generation_provider: LmProvider,
    documents: Iterable[tuple[str, str]],
    cfg: MinePipelineConfig,
) -> dict:
    """Mine a corpus. Returns records, selection records, and a report."""
    refine_template = (
        None if cfg.dry_run else load_template("refine_v1", cfg.templates_dir)
    )

    def one(item: tuple[str, str]) -> dict:
        doc_id, text = item
        try:
            return mine_document(
                scoring_provider, generation_provider, doc_id, text, cfg, refine_template
            )
        except Exception as exc:  # recorded, not fatal to the run
            logger.exception("mining failed for %s", doc_id)
            return {
                "doc_id": doc_id,
                "status": "error",
                "error": f"{type(exc).__name__}: {exc}",
                "record": None,
                "selections": [],
            }

    results = _map_ordered(one, list(documents), cfg.workers)
    records: list[CorpusRecord] = [
        r["record"] for r in results if r["record"] is not None
    ]
    selections = [s for r in results for s in r["selections"]]
    failures = [
        {"doc_id": r["doc_id"], "error": r["error"]}
        for r in results
        if r["status"] == "error"
    ]
    return {
        "records": records,
        "selections": selections,
        "failures": failures,
        "documents": len(results),
        "pass_through": sum(1 for r in results if r["status"] == "no_key_tokens"),
    }


def truncation_baseline_answer(
    provider: LmProvider,
    doc: TokenizedDocument,
    question: str,
    baseline_tokens: int,
    max_new_tokens: int,
) -> str:
    """What a fixed-window model sees: the document tail plus the question."""
    start = max(0, len(doc) - baseline_tokens)
    prompt = doc.slice_text(start, len(doc)) + "\n" + question
    request = GenerationRequest(
        prompt=provider.tokenize(prompt).tokens, max_new_tokens=max_new_tokens
    )
    try:
        return provider.generate(request)
    except GenerationEmpty:
        return ""


def run_eval(
    provider: LmProvider,
    tasks: Sequence[SyntheticTask],
    cfg: EvalConfig,
) -> dict:
    """Recall evaluation: recap agent at each chunk count vs. truncation."""

    def one(task: SyntheticTask) -> dict:
        doc = TokenizedDocument.from_text(task.document, provider, task.doc_id)
        by_n: dict[str, dict] = {}
        for n in cfg.n_chunks_grid:
            agent_cfg = AgentConfig(
                n_chunks=n,
                recap_budget=cfg.recap_budget,
                recap_max_new_tokens=cfg.recap_max_new_tokens,
                answer_max_new_tokens=cfg.answer_max_new_tokens,
                compaction_fraction=cfg.compaction_fraction,
            )
            transcript = run_agent(provider, doc, task.question, agent_cfg)
            by_n[str(n)] = {
                "answer": transcript["answer"],
                "recovered": task.expected_answer in transcript["answer"],
                "generate_calls": transcript["ledger"]["generate_calls"],
                "compactions": transcript["ledger"]["compactions"],
            }
        baseline = truncation_baseline_answer(
            provider, doc, task.question, cfg.baseline_tokens, cfg.answer_max_new_tokens
        )
        return {
            "doc_id": task.doc_id,
            "by_n_chunks": by_n,
            "baseline": {
                "answer": baseline,
                "recovered": task.expected_answer in baseline,
            },
        }

    rows = _map_ordered(one, list(tasks), cfg.workers)
    recovery = {
        str(n): (
            sum(1 for r in rows if r["by_n_chunks"][str(n)]["recovered"]) / len(rows)
            if rows
            else 0.0
        )
        for n in cfg.n_chunks_grid
    }
    baseline_rate = (
        sum(1 for r in rows if r["baseline"]["recovered"]) / len(rows) if rows else 0.0
    )
    return {
        "tasks": rows,
        "recovery_by_n_chunks": recovery,
        "baseline_recovery": baseline_rate,
        "n_tasks": len(rows),
    }
