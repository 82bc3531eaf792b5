"""Adaptive n-gram model: a deterministic, in-process language model whose
probabilities come entirely from the supplied context.

For a context ``ctx`` and target ``t`` the model computes

    P(t | ctx) = (C(g.t) + alpha * P_bg(t)) / (C(g) + alpha)

where ``g`` is the last ``order - 1`` tokens of the context, ``C`` counts
occurrences inside the context (the context-final occurrence of ``g``
included), and ``P_bg`` is uniform over the distinct context tokens plus a
reserved unknown symbol. Targets never seen in the context therefore receive
the small smoothed floor rather than zero. Because the statistics are
recomputed from the conditioning text on every call, a token that repeats a
pattern from far back in the context scores sharply higher with that history
present than without it — which is exactly the signal the gap scorer needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ..errors import ContextOverflow, GenerationEmpty
from .base import (
    GenerationRequest,
    LmProvider,
    Tokenization,
    detokenize,
    truncate_at_stops,
    whitespace_tokenize,
)

UNKNOWN_TOKEN = "<unk>"


@dataclass(frozen=True)
class AdaptiveNgramConfig:
    """Model order ``m`` (grams of ``m - 1`` context tokens) and the smoothing
    weight given to the uniform background distribution."""

    order: int = 3
    smoothing_alpha: float = 1.0

    def __post_init__(self) -> None:
        if self.order < 2:
            raise ValueError("order must be >= 2")
        if self.smoothing_alpha <= 0:
            raise ValueError("smoothing_alpha must be > 0")


def _gram_counts(
    ctx: Sequence[str], gram: tuple[str, ...], target: str
) -> tuple[int, int]:
    """Count occurrences of ``gram`` in ``ctx`` and of ``gram`` followed by
    ``target``. Scans with list.index so runs between matches stay in C."""
    k = len(gram)
    n = len(ctx)
    first = gram[0]
    limit = n - k
    c_g = 0
    c_gt = 0
    s = -1
    while True:
        try:
            s = ctx.index(first, s + 1)
        except ValueError:
            break
        if s > limit:
            break
        matched = True
        for off in range(1, k):
            if ctx[s + off] != gram[off]:
                matched = False
                break
        if matched:
            c_g += 1
            nxt = s + k
            if nxt < n and ctx[nxt] == target:
                c_gt += 1
    return c_g, c_gt


def _continuations(ctx: Sequence[str], gram: tuple[str, ...]) -> tuple[int, dict[str, int]]:
    """Total gram count plus per-token continuation counts. The context-final
    occurrence of the gram has no following token; its continuation is booked
    under the unknown symbol so the conditional distribution is complete."""
    k = len(gram)
    n = len(ctx)
    first = gram[0]
    limit = n - k
    c_g = 0
    cont: dict[str, int] = {}
    s = -1
    while True:
        try:
            s = ctx.index(first, s + 1)
        except ValueError:
            break
        if s > limit:
            break
        if all(ctx[s + off] == gram[off] for off in range(1, k)):
            c_g += 1
            nxt = s + k
            follower = ctx[nxt] if nxt < n else UNKNOWN_TOKEN
            cont[follower] = cont.get(follower, 0) + 1
    return c_g, cont


class AdaptiveNgramModel(LmProvider):
    """Pure-functional provider: no mutable state, identical outputs for
    identical inputs on every platform."""

    def __init__(
        self,
        config: AdaptiveNgramConfig | None = None,
        *,
        max_context_tokens: int = 1 << 20,
    ) -> None:
        if max_context_tokens < 2:
            raise ValueError("max_context_tokens must be >= 2")
        self._config = config or AdaptiveNgramConfig()
        self._max_context_tokens = max_context_tokens

    @property
    def config(self) -> AdaptiveNgramConfig:
        return self._config

    @property
    def provider_id(self) -> str:
        return f"adaptive-ngram-m{self._config.order}"

    @property
    def max_context_tokens(self) -> int:
        return self._max_context_tokens

    def tokenize(self, text: str) -> Tokenization:
        return whitespace_tokenize(text)

    def token_logprob(self, context: Sequence[str], target: str) -> float:
        ctx = list(context)
        if len(ctx) > self._max_context_tokens:
            raise ContextOverflow(
                f"context of {len(ctx)} tokens exceeds cap {self._max_context_tokens}"
            )
        p_bg = 1.0 / (len(set(ctx)) + 1)
        if not ctx:
            return math.log(p_bg)
        gram = tuple(ctx[-(self._config.order - 1):])
        c_g, c_gt = _gram_counts(ctx, gram, target)
        alpha = self._config.smoothing_alpha
        return math.log((c_gt + alpha * p_bg) / (c_g + alpha))

    def next_token_distribution(self, context: Sequence[str]) -> dict[str, float]:
        """Full conditional distribution over distinct context tokens plus the
        unknown symbol. Probabilities sum to 1."""
        ctx = list(context)
        if len(ctx) > self._max_context_tokens:
            raise ContextOverflow(
                f"context of {len(ctx)} tokens exceeds cap {self._max_context_tokens}"
            )
        if not ctx:
            return {UNKNOWN_TOKEN: 1.0}
        vocab = sorted(set(ctx))
        p_bg = 1.0 / (len(vocab) + 1)
        gram = tuple(ctx[-(self._config.order - 1):])
        c_g, cont = _continuations(ctx, gram)
        alpha = self._config.smoothing_alpha
        denom = c_g + alpha
        dist = {tok: (cont.get(tok, 0) + alpha * p_bg) / denom for tok in vocab}
        dist[UNKNOWN_TOKEN] = (cont.get(UNKNOWN_TOKEN, 0) + alpha * p_bg) / denom
        return dist

    def generate(self, request: GenerationRequest) -> str:
        """Greedy decoding: at each step emit the most probable known token,
        breaking probability ties toward the lexicographically smallest."""
        seq = list(request.prompt)
        generated: list[str] = []
        stops = request.stop_sequences
        for _ in range(request.max_new_tokens):
            window = seq[-self._max_context_tokens:]
            dist = self.next_token_distribution(window)
            dist.pop(UNKNOWN_TOKEN, None)
            if not dist:
                break
            best_p = max(dist.values())
            best = min(tok for tok, p in dist.items() if p == best_p)
            generated.append(best)
            seq.append(best)
            if any(
                len(generated) >= len(stop) and tuple(generated[-len(stop):]) == stop
                for stop in stops
                if stop
            ):
                hit = next(
                    stop
                    for stop in stops
                    if stop and tuple(generated[-len(stop):]) == stop
                )
                generated = generated[: len(generated) - len(hit)]
                break
        text = truncate_at_stops(detokenize(generated), stops)
        if not text.strip():
            raise GenerationEmpty("greedy decoding produced no tokens")
        return text
