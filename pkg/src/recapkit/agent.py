"""Inference-time recap agent.

The agent walks a long document chunk by chunk, asking the model after each
chunk for a recap of what just happened, and carries the accumulated recaps —
not the raw text — forward as memory. The recap buffer lives under a token
budget: when it overflows, the oldest entries are compacted into a single
summary, and if summarization fails to shrink them the agent falls back to
dropping oldest entries outright.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .corpus import DEFAULT_TAGS, RecapTags, strip_tag_literals, wrap_recap
from .document import TokenizedDocument
from .errors import GenerationEmpty
from .providers.base import GenerationRequest, LmProvider

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AgentConfig:
    """Chunking and memory-budget settings.

    Exactly one of ``n_chunks`` / ``chunk_tokens`` picks the chunking mode.
    ``recap_budget`` is the buffer cap in tokens and must exceed
    ``recap_max_new_tokens`` so a fresh recap always fits on its own.
    """

    n_chunks: int | None = None
    chunk_tokens: int | None = None
    recap_budget: int = 512
    recap_max_new_tokens: int = 64
    answer_max_new_tokens: int = 128
    compaction_fraction: float = 0.5

    def __post_init__(self) -> None:
        if (self.n_chunks is None) == (self.chunk_tokens is None):
            raise ValueError("set exactly one of n_chunks / chunk_tokens")
        if self.n_chunks is not None and self.n_chunks < 1:
            raise ValueError("n_chunks must be >= 1")
        if self.chunk_tokens is not None and self.chunk_tokens < 1:
            raise ValueError("chunk_tokens must be >= 1")
        if self.recap_max_new_tokens < 1 or self.answer_max_new_tokens < 1:
            raise ValueError("generation budgets must be >= 1")
        if self.recap_budget <= self.recap_max_new_tokens:
            raise ValueError("recap_budget must exceed recap_max_new_tokens")
        if not 0 < self.compaction_fraction < 1:
            raise ValueError("compaction_fraction must be in (0, 1)")


@dataclass(frozen=True)
class Chunk:
    index: int
    start: int
    end: int
    text: str


@dataclass
class RecapItem:
    text: str
    token_count: int


@dataclass
class AgentState:
    buffer: list[RecapItem] = field(default_factory=list)
    chunk_index: int = 0
    last_chunk_text: str = ""
    last_recap: str = ""
    generate_calls: int = 0
    compactions: int = 0
    fallback_truncations: int = 0
    compaction_log: list[dict] = field(default_factory=list)

    def buffer_tokens(self) -> int:
        return sum(item.token_count for item in self.buffer)

    def serialized_buffer(self, tags: RecapTags = DEFAULT_TAGS) -> str:
        return "".join(wrap_recap(item.text, tags) + "\n" for item in self.buffer)


def chunk_document(doc: TokenizedDocument, cfg: AgentConfig) -> list[Chunk]:
    """Partition the document into contiguous chunks.

    In ``n_chunks`` mode sizes differ by at most one token before boundary
    adjustment, with earlier chunks taking the remainder. Interior boundaries
    then shift backward to the nearest sentence start whenever that keeps the
    preceding chunk non-empty, so chunks tend to end on sentence boundaries.
    """
    n = len(doc)
    if n == 0:
        raise ValueError("cannot chunk an empty document")
    if cfg.n_chunks is not None:
        k = min(cfg.n_chunks, n)
        base, rem = divmod(n, k)
        boundaries = [0]
        for j in range(k):
            boundaries.append(boundaries[-1] + base + (1 if j < rem else 0))
    else:
        boundaries = list(range(0, n, cfg.chunk_tokens)) + [n]
        if boundaries[-2] == n:
            boundaries.pop()
    for j in range(1, len(boundaries) - 1):
        snapped = doc.sentence_start_at_or_before(boundaries[j])
        if snapped > boundaries[j - 1]:
            boundaries[j] = snapped
    return [
        Chunk(index=j, start=a, end=b, text=doc.slice_text(a, b))
        for j, (a, b) in enumerate(zip(boundaries, boundaries[1:]))
    ]


def build_step_prompt(
    state: AgentState, chunk: Chunk, tags: RecapTags = DEFAULT_TAGS
) -> str:
    return state.serialized_buffer(tags) + chunk.text + tags.open


def build_answer_prompt(
    state: AgentState, question: str, tags: RecapTags = DEFAULT_TAGS
) -> str:
    return state.serialized_buffer(tags) + state.last_chunk_text + "\n" + question


def step(
    provider: LmProvider,
    state: AgentState,
    chunk: Chunk,
    cfg: AgentConfig,
    tags: RecapTags = DEFAULT_TAGS,
    compact_template: str | None = None,
) -> AgentState:
    """Read one chunk: generate its recap, append to the buffer, and compact
    until the buffer fits the budget. Mutates and returns ``state``."""
    prompt = build_step_prompt(state, chunk, tags)
    request = GenerationRequest(
        prompt=provider.tokenize(prompt).tokens,
        max_new_tokens=cfg.recap_max_new_tokens,
        stop_sequences=((tags.close,),),
    )
    state.generate_calls += 1
    try:
        raw = provider.generate(request)
    except GenerationEmpty:
        logger.info("empty recap for chunk %d; buffer unchanged", chunk.index)
        raw = ""
    recap = strip_tag_literals(raw, tags).strip()
    if recap:
        token_count = len(provider.tokenize(recap).tokens)
        state.buffer.append(RecapItem(text=recap, token_count=token_count))
    state.last_recap = recap
    state.last_chunk_text = chunk.text
    state.chunk_index = chunk.index + 1
    while state.buffer_tokens() > cfg.recap_budget:
        compact(provider, state, cfg, tags, compact_template)
    return state


def compact(
    provider: LmProvider,
    state: AgentState,
    cfg: AgentConfig,
    tags: RecapTags = DEFAULT_TAGS,
    template: str | None = None,
) -> None:
    """Replace the oldest entries (at least compaction_fraction of the budget,
    by tokens) with one generated summary.

    A summary at least as long as what it replaces makes no progress; that
    counts as divergence, and the agent instead drops oldest entries until
    the buffer fits — newest entries always survive.
    """
    if state.buffer_tokens() <= cfg.recap_budget:
        raise ValueError("compact called while the buffer fits its budget")
    if template is None:
        from .corpus import load_template

        template = load_template("compact_v1")
    threshold = cfg.compaction_fraction * cfg.recap_budget
    removed: list[RecapItem] = []
    removed_tokens = 0
    while state.buffer and removed_tokens < threshold:
        item = state.buffer.pop(0)
        removed.append(item)
        removed_tokens += item.token_count
    prompt = template.format(entries="\n".join(item.text for item in removed))
    request = GenerationRequest(
        prompt=provider.tokenize(prompt).tokens,
        max_new_tokens=cfg.recap_max_new_tokens,
        stop_sequences=((tags.close,),),
    )
    state.generate_calls += 1
    state.compactions += 1
    try:
        raw = provider.generate(request)
    except GenerationEmpty:
        raw = ""
    summary = strip_tag_literals(raw, tags).strip()
    summary_tokens = len(provider.tokenize(summary).tokens) if summary else 0
    diverged = not summary or summary_tokens >= removed_tokens
    if diverged:
        logger.warning(
            "compaction diverged (%d tokens in, %d out); hard-truncating oldest",
            removed_tokens,
            summary_tokens,
        )
        state.fallback_truncations += 1
        while state.buffer_tokens() > cfg.recap_budget and state.buffer:
            state.buffer.pop(0)
        state.compaction_log.append(
            {
                "after_chunk": state.chunk_index,
                "removed": [item.text for item in removed],
                "summary": summary,
                "fallback": True,
            }
        )
        return
    state.buffer.insert(0, RecapItem(text=summary, token_count=summary_tokens))
    state.compaction_log.append(
        {
            "after_chunk": state.chunk_index,
            "removed": [item.text for item in removed],
            "summary": summary,
            "fallback": False,
        }
    )


def answer(
    provider: LmProvider,
    state: AgentState,
    question: str,
    cfg: AgentConfig,
    tags: RecapTags = DEFAULT_TAGS,
) -> str:
    """Answer the question from the recap buffer plus the final chunk."""
    prompt = build_answer_prompt(state, question, tags)
    request = GenerationRequest(
        prompt=provider.tokenize(prompt).tokens,
        max_new_tokens=cfg.answer_max_new_tokens,
    )
    state.generate_calls += 1
    return provider.generate(request)


def run_agent(
    provider: LmProvider,
    doc: TokenizedDocument,
    question: str,
    cfg: AgentConfig,
    tags: RecapTags = DEFAULT_TAGS,
    compact_template: str | None = None,
) -> dict:
    """Full episode: chunk, step through the document, answer. Returns a
    transcript with every prompt, recap, compaction event, and the answer."""
    chunks = chunk_document(doc, cfg)
    state = AgentState()
    steps: list[dict] = []
    for chunk in chunks:
        prompt = build_step_prompt(state, chunk, tags)
        step(provider, state, chunk, cfg, tags, compact_template)
        steps.append(
            {
                "chunk_index": chunk.index,
                "prompt": prompt,
                "recap": state.last_recap,
                "buffer_tokens": state.buffer_tokens(),
            }
        )
    answer_prompt = build_answer_prompt(state, question, tags)
    try:
        final = answer(provider, state, question, cfg, tags)
    except GenerationEmpty:
        logger.warning("answer generation came back empty for %s", doc.doc_id)
        final = ""
    return {
        "doc_id": doc.doc_id,
        "question": question,
        "chunks": [{"index": c.index, "start": c.start, "end": c.end} for c in chunks],
        "steps": steps,
        "compactions": list(state.compaction_log),
        "answer_prompt": answer_prompt,
        "answer": final,
        "ledger": {
            "chunks": len(chunks),
            "generate_calls": state.generate_calls,
            "compactions": state.compactions,
            "fallback_truncations": state.fallback_truncations,
        },
    }
