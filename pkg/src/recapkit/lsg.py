"""Long-short gap scoring: find tokens that the distant history explains but
the recent window does not.

The gap at position i is log P(x_i | long context) - log P(x_i | short
context). A large positive gap marks a token whose predictability depends on
something far back — a key token worth recapping.
"""

from __future__ import annotations

from dataclasses import dataclass

from .document import ContextConfig, TokenizedDocument, long_context, short_context
from .errors import NoKeyTokens
from .providers.base import LmProvider


@dataclass(frozen=True)
class LsgRecord:
    position: int
    token: str
    log_gap: float


@dataclass(frozen=True)
class MiningConfig:
    """Key-token selection settings.

    ``min_position`` defaults to the short window size so every scored token
    has a full recency window behind it. ``suppression_radius`` defaults to a
    quarter of the short window; among nearby candidates only the
    highest-ranked survives.
    """

    top_k: int
    context: ContextConfig
    min_position: int | None = None
    stride: int = 1
    suppression_radius: int | None = None

    def __post_init__(self) -> None:
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.min_position is not None and self.min_position < 0:
            raise ValueError("min_position must be >= 0")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.suppression_radius is not None and self.suppression_radius < 0:
            raise ValueError("suppression_radius must be >= 0")

    @property
    def effective_min_position(self) -> int:
        if self.min_position is not None:
            return self.min_position
        return self.context.short_window

    @property
    def effective_suppression_radius(self) -> int:
        if self.suppression_radius is not None:
            return self.suppression_radius
        return self.context.short_window // 4


def lsg_score(
    provider: LmProvider, doc: TokenizedDocument, index: int, cfg: ContextConfig
) -> LsgRecord:
    """Score one position. Requires 0 <= index < len(doc)."""
    if not 0 <= index < len(doc):
        raise IndexError(f"position {index} outside document of {len(doc)} tokens")
    target = doc.tokens[index]
    long_lp = provider.token_logprob(long_context(doc, index, cfg), target)
    short_lp = provider.token_logprob(short_context(doc, index, cfg), target)
    return LsgRecord(position=index, token=target, log_gap=long_lp - short_lp)


def score_positions(
    provider: LmProvider, doc: TokenizedDocument, cfg: MiningConfig
) -> list[LsgRecord]:
    """Gap records for every scanned position, in document order."""
    return [
        lsg_score(provider, doc, i, cfg.context)
        for i in range(cfg.effective_min_position, len(doc), cfg.stride)
    ]


def select_key_tokens(
    provider: LmProvider, doc: TokenizedDocument, cfg: MiningConfig
) -> list[LsgRecord]:
    """Top-K positive-gap tokens, ranked by gap (position breaks ties), with
    greedy suppression of candidates within the radius of a stronger one.

    Raises NoKeyTokens when no scanned position has a positive gap — which
    includes every document shorter than the minimum position.
    """
    positive = [r for r in score_positions(provider, doc, cfg) if r.log_gap > 0]
    if not positive:
        raise NoKeyTokens(f"no positive-gap position in document {doc.doc_id!r}")
    ranked = sorted(positive, key=lambda r: (-r.log_gap, r.position))
    radius = cfg.effective_suppression_radius
    kept: list[LsgRecord] = []
    for record in ranked:
        if any(abs(record.position - k.position) <= radius for k in kept):
            continue
        kept.append(record)
        if len(kept) == cfg.top_k:
            break
    return kept
