"""Tokenized documents with character spans and sentence boundaries, plus the
long/short context slices that gap scoring conditions on. The sentence rule
itself lives in ``recapkit.text``; this module re-exports it."""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Iterator

from .text import sentence_start_indices, split_sentences

if TYPE_CHECKING:
    from .providers.base import LmProvider

__all__ = [
    "ContextConfig",
    "TokenizedDocument",
    "long_context",
    "read_documents",
    "sentence_start_indices",
    "short_context",
    "split_sentences",
]


@dataclass(frozen=True)
class ContextConfig:
    """Window sizes for gap scoring: the short window is the recency slice a
    key token must not be explainable from; the long window (None = whole
    prefix) is the full history."""

    short_window: int = 512
    long_window: int | None = None

    def __post_init__(self) -> None:
        if self.short_window < 1:
            raise ValueError("short_window must be >= 1")
        if self.long_window is not None and self.long_window < self.short_window:
            raise ValueError("long_window must be >= short_window")


@dataclass(frozen=True)
class TokenizedDocument:
    doc_id: str
    text: str
    tokens: tuple[str, ...]
    spans: tuple[tuple[int, int], ...]
    sentence_starts: tuple[int, ...]
    provider_id: str

    @classmethod
    def from_text(
        cls, text: str, provider: LmProvider, doc_id: str = "doc"
    ) -> "TokenizedDocument":
        tok = provider.tokenize(text)
        starts = sentence_start_indices(text, tok.tokens, tok.spans)
        return cls(
            doc_id=doc_id,
            text=text,
            tokens=tok.tokens,
            spans=tok.spans,
            sentence_starts=tuple(starts),
            provider_id=provider.provider_id,
        )

    def __len__(self) -> int:
        return len(self.tokens)

    def sentence_start_at_or_before(self, index: int) -> int:
        """Largest sentence start <= index."""
        pos = bisect_right(self.sentence_starts, index) - 1
        return self.sentence_starts[pos]

    def sentence_start_at_or_after(self, index: int) -> int | None:
        """Smallest sentence start >= index, or None past the last one."""
        pos = bisect_right(self.sentence_starts, index - 1)
        if pos < len(self.sentence_starts):
            return self.sentence_starts[pos]
        return None

    def slice_text(self, start: int, end: int) -> str:
        """Original text spanned by tokens [start, end)."""
        if start >= end:
            return ""
        return self.text[self.spans[start][0] : self.spans[end - 1][1]]


def long_context(
    doc: TokenizedDocument, index: int, cfg: ContextConfig
) -> tuple[str, ...]:
    """Tokens before index, back at most long_window (whole prefix if None)."""
    if cfg.long_window is None:
        return doc.tokens[:index]
    return doc.tokens[max(0, index - cfg.long_window) : index]


def short_context(
    doc: TokenizedDocument, index: int, cfg: ContextConfig
) -> tuple[str, ...]:
    """The last short_window tokens before index."""
    return doc.tokens[max(0, index - cfg.short_window) : index]


def read_documents(path: str | Path) -> Iterator[tuple[str, str]]:
    """Yield (doc_id, text) pairs from a corpus file.

    ``.jsonl`` files hold one ``{"id": ..., "text": ...}`` object per line;
    anything else is read as a single plain-text document named after the file.
    """
    path = Path(path)
    if path.suffix == ".jsonl":
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh):
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                yield str(obj.get("id", f"{path.stem}-{lineno}")), obj["text"]
    else:
        yield path.stem, path.read_text(encoding="utf-8")
