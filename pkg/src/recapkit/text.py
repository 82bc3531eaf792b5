"""Text primitives shared by providers and the document model: whitespace
tokenization with character spans, and the sentence-boundary rule in both its
token-level and text-level forms.

A sentence starts at token 0, and at token k when the previous token ends
with '.', '!' or '?', or when the separator between token k-1 and token k
contains a newline.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

_TOKEN_RE = re.compile(r"\S+")
_SENTENCE_END = (".", "!", "?")


@dataclass(frozen=True)
class Tokenization:
    tokens: tuple[str, ...]
    spans: tuple[tuple[int, int], ...] = field(default=())


def whitespace_tokenize(text: str) -> Tokenization:
    """Split on whitespace, keeping character spans. Spans are ordered,
    non-overlapping, and cover every non-separator character."""
    tokens: list[str] = []
    spans: list[tuple[int, int]] = []
    for m in _TOKEN_RE.finditer(text):
        tokens.append(m.group())
        spans.append((m.start(), m.end()))
    return Tokenization(tuple(tokens), tuple(spans))


def detokenize(tokens: Sequence[str]) -> str:
    """Inverse of whitespace_tokenize up to separator normalization."""
    return " ".join(tokens)


def sentence_start_indices(
    text: str, tokens: Sequence[str], spans: Sequence[tuple[int, int]]
) -> list[int]:
    starts = [0] if tokens else []
    for k in range(1, len(tokens)):
        prev = tokens[k - 1]
        if prev.endswith(_SENTENCE_END):
            starts.append(k)
            continue
        separator = text[spans[k - 1][1] : spans[k][0]]
        if "\n" in separator:
            starts.append(k)
    return starts


def split_sentences(text: str) -> list[str]:
    """Split text into sentence pieces that concatenate back to the input.

    Pieces break exactly where ``sentence_start_indices`` places a boundary,
    so the text-level and token-level views of a document always agree. Each
    piece carries its trailing separator characters.
    """
    if not text:
        return []
    tok = whitespace_tokenize(text)
    if not tok.tokens:
        return [text]
    starts = sentence_start_indices(text, tok.tokens, tok.spans)
    pieces = []
    prev = 0
    for k in starts[1:]:
        boundary = tok.spans[k][0]
        pieces.append(text[prev:boundary])
        prev = boundary
    pieces.append(text[prev:])
    return pieces
