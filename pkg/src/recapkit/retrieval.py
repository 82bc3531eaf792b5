"""Remote-segment mining: find the history segment that best explains a key
token when prepended to its recent window.

Candidates are sliding windows over the remote region — everything before the
key token's short window — snapped outward to sentence boundaries. Each
candidate is scored by the key token's log-probability under
``segment + short window``; the winner must strictly beat the short-window
baseline or there is no improving segment.
"""

from __future__ import annotations

from dataclasses import dataclass

from .document import ContextConfig, TokenizedDocument, short_context
from .errors import EmptyRemotePrefix, NoImprovingSegment
from .lsg import LsgRecord
from .providers.base import LmProvider


@dataclass(frozen=True)
class CandidateSegment:
    """A sentence-aligned token range [start, end) in the remote region."""

    start: int
    end: int
    text: str


@dataclass(frozen=True)
class RetrievalConfig:
    window_size: int = 128
    step_size: int = 64

    def __post_init__(self) -> None:
        if self.window_size < 1:
            raise ValueError("window_size must be >= 1")
        if self.step_size < 1:
            raise ValueError("step_size must be >= 1")
        if self.step_size > self.window_size:
            raise ValueError("step_size must not exceed window_size")


@dataclass(frozen=True)
class SegmentSelection:
    key: LsgRecord
    segment: CandidateSegment
    segment_logprob: float
    baseline_logprob: float


def enumerate_candidates(
    doc: TokenizedDocument,
    key_position: int,
    cfg: RetrievalConfig,
    context: ContextConfig,
) -> list[CandidateSegment]:
    """Sentence-snapped candidate windows over [0, key_position - short_window).

    Window starts walk the region at step_size intervals; each window is
    widened to the enclosing sentence boundaries, then capped at the region
    end. Duplicates collapse; results are ordered by (start, end).
    """
    region_end = key_position - context.short_window
    if region_end <= 0:
        raise EmptyRemotePrefix(
            f"key token at {key_position} has no history beyond its short window"
        )
    seen: set[tuple[int, int]] = set()
    for raw_start in range(0, region_end, cfg.step_size):
        raw_end = min(raw_start + cfg.window_size, region_end)
        start = doc.sentence_start_at_or_before(raw_start)
        snapped = doc.sentence_start_at_or_after(raw_end)
        end = region_end if snapped is None else min(snapped, region_end)
        seen.add((start, end))
    return [
        CandidateSegment(start=s, end=e, text=doc.slice_text(s, e))
        for s, e in sorted(seen)
    ]


def insert_segment(
    doc: TokenizedDocument,
    segment: CandidateSegment,
    key_position: int,
    context: ContextConfig,
) -> tuple[str, ...]:
    """Conditioning sequence: segment tokens followed by the short window."""
    return doc.tokens[segment.start : segment.end] + short_context(
        doc, key_position, context
    )


def best_segment(
    provider: LmProvider,
    doc: TokenizedDocument,
    key: LsgRecord,
    cfg: RetrievalConfig,
    context: ContextConfig,
) -> SegmentSelection:
    """Argmax over candidates; the first candidate attaining the maximum wins.

    Raises NoImprovingSegment when nothing strictly beats the short-window
    baseline, and propagates EmptyRemotePrefix from candidate enumeration.
    """
    candidates = enumerate_candidates(doc, key.position, cfg, context)
    target = doc.tokens[key.position]
    baseline = provider.token_logprob(short_context(doc, key.position, context), target)
    best: CandidateSegment | None = None
    best_lp = float("-inf")
    for cand in candidates:
        lp = provider.token_logprob(insert_segment(doc, cand, key.position, context), target)
        if lp > best_lp:
            best = cand
            best_lp = lp
    if best is None or best_lp <= baseline:
        raise NoImprovingSegment(
            f"no segment beats the short-context baseline for position {key.position}"
        )
    return SegmentSelection(
        key=key, segment=best, segment_logprob=best_lp, baseline_logprob=baseline
    )
