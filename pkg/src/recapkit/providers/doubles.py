"""Deterministic generation doubles for exercising the agent loop without a
real model.

- EchoDouble parrots its prompt.
- ExtractiveDouble returns exactly the prompt sentences containing a marker
  phrase — a perfectly faithful summarizer for marked facts.
- LossyDouble keeps marked sentences reliably only near the start of the
  fresh text it reads (and always keeps marked sentences already in its
  recap memory); everything else survives with a seed-determined coin flip.
  Reading a long document in more, smaller chunks therefore preserves more:
  each chunk restarts the attention window.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from ..text import detokenize, split_sentences
from .base import GenerationOnlyProvider, GenerationRequest, finalize_generation

_DEFAULT_MARKER = "§NEEDLE§"
_CLOSE_TAG = "</re>"
_OPEN_TAG = "<re>"


def _strip_tags(text: str) -> str:
    return text.replace(_OPEN_TAG, "").replace(_CLOSE_TAG, "")


def _clean_sentences(text: str) -> list[str]:
    return [s.strip() for s in split_sentences(_strip_tags(text)) if s.strip()]


class EchoDouble(GenerationOnlyProvider):
    """Returns the first max_new_tokens tokens of the prompt."""

    @property
    def provider_id(self) -> str:
        return "echo"

    def generate(self, request: GenerationRequest) -> str:
        text = detokenize(request.prompt[: request.max_new_tokens])
        return finalize_generation(text, request)


class ExtractiveDouble(GenerationOnlyProvider):
    """Returns the prompt sentences containing the marker, in order."""

    def __init__(self, marker: str = _DEFAULT_MARKER) -> None:
        self._marker = marker

    @property
    def provider_id(self) -> str:
        return "extractive"

    @property
    def marker(self) -> str:
        return self._marker

    def generate(self, request: GenerationRequest) -> str:
        text = detokenize(request.prompt)
        kept = [s for s in _clean_sentences(text) if self._marker in s]
        return finalize_generation(" ".join(kept), request)


@dataclass(frozen=True)
class LossyConfig:
    marker: str = _DEFAULT_MARKER
    keep_probability: float = 0.2
    attention_span: int = 40  # tokens of fresh text read attentively

    def __post_init__(self) -> None:
        if not 0 <= self.keep_probability <= 1:
            raise ValueError("keep_probability must be in [0, 1]")
        if self.attention_span < 1:
            raise ValueError("attention_span must be >= 1")


class LossyDouble(GenerationOnlyProvider):
    """A forgetful summarizer with a short attention span.

    The prompt divides at the last close tag: everything before it is recap
    memory, everything after is fresh text. Marked sentences in memory are
    always kept (deduplicated); marked sentences in fresh text are kept only
    when they begin within ``attention_span`` tokens of the fresh region's
    start. Unmarked sentences everywhere survive with probability
    ``keep_probability``, decided by a hash of (seed, sentence) so the same
    sentence always gets the same fate.
    """

    def __init__(self, seed: int = 0, config: LossyConfig | None = None) -> None:
        self._seed = seed
        self._config = config or LossyConfig()

    @property
    def provider_id(self) -> str:
        return f"lossy-{self._seed}"

    @property
    def config(self) -> LossyConfig:
        return self._config

    def _keeps(self, sentence: str) -> bool:
        digest = hashlib.sha256(f"{self._seed}|{sentence}".encode()).digest()
        draw = int.from_bytes(digest[:8], "big") / float(1 << 64)
        return draw < self._config.keep_probability

    def generate(self, request: GenerationRequest) -> str:
        text = detokenize(request.prompt)
        tag_end = text.rfind(_CLOSE_TAG)
        if tag_end >= 0:
            memory_text = text[: tag_end + len(_CLOSE_TAG)]
            fresh_text = text[tag_end + len(_CLOSE_TAG) :]
        else:
            memory_text = ""
            fresh_text = text
        if fresh_text.rstrip().endswith(_OPEN_TAG):
            fresh_text = fresh_text.rstrip()[: -len(_OPEN_TAG)]
        marker = self._config.marker
        kept: list[str] = []
        seen: set[str] = set()
        for sentence in _clean_sentences(memory_text):
            if marker in sentence:
                if sentence not in seen:
                    kept.append(sentence)
                    seen.add(sentence)
            elif self._keeps(sentence) and sentence not in seen:
                kept.append(sentence)
                seen.add(sentence)
        clean_fresh = _strip_tags(fresh_text)
        offset_tokens = 0
        for piece in split_sentences(clean_fresh):
            sentence = piece.strip()
            piece_tokens = len(piece.split())
            if sentence:
                if marker in sentence:
                    if offset_tokens < self._config.attention_span and sentence not in seen:
                        kept.append(sentence)
                        seen.add(sentence)
                elif self._keeps(sentence) and sentence not in seen:
                    kept.append(sentence)
                    seen.add(sentence)
            offset_tokens += piece_tokens
        return finalize_generation(" ".join(kept), request)
