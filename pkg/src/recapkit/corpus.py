"""Recap construction: refine mined segments into short recaps, insert them
into documents between tags, and round-trip the result.

The tag convention is load-bearing: an augmented document interleaves
original text with ``<re>...</re>\\n`` blocks at sentence starts, and
stripping those blocks restores the original text byte-for-byte.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

from .document import TokenizedDocument, split_sentences
from .errors import GenerationEmpty, TaggedInputError
from .providers.base import GenerationRequest, LmProvider
from .retrieval import SegmentSelection

logger = logging.getLogger(__name__)

MAX_RECAP_SENTENCES = 6


class RecapTags(NamedTuple):
    open: str = "<re>"
    close: str = "</re>"


DEFAULT_TAGS = RecapTags()


@dataclass(frozen=True)
class RecapEntry:
    """A refined recap destined for one insertion point (a sentence start)."""

    refined_text: str
    insertion_position: int
    segment_start: int
    segment_end: int
    log_gap: float

    def __post_init__(self) -> None:
        if not self.refined_text.strip():
            raise ValueError("refined_text must be non-empty")
        if self.insertion_position < 0:
            raise ValueError("insertion_position must be >= 0")

    @classmethod
    def from_selection(
        cls, selection: SegmentSelection, refined_text: str, insertion_position: int
    ) -> "RecapEntry":
        return cls(
            refined_text=refined_text,
            insertion_position=insertion_position,
            segment_start=selection.segment.start,
            segment_end=selection.segment.end,
            log_gap=selection.key.log_gap,
        )


@dataclass(frozen=True)
class CorpusRecord:
    doc_id: str
    original_text: str
    augmented_text: str
    recaps: tuple[dict, ...] = field(default=())

    def as_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "original_text": self.original_text,
            "augmented_text": self.augmented_text,
            "recaps": list(self.recaps),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "CorpusRecord":
        return cls(
            doc_id=obj["doc_id"],
            original_text=obj["original_text"],
            augmented_text=obj["augmented_text"],
            recaps=tuple(obj.get("recaps", ())),
        )


def load_template(name: str, templates_dir: str | Path | None = None) -> str:
    """Load a prompt template by name, preferring an override directory."""
    filename = f"{name}.txt"
    if templates_dir is not None:
        return (Path(templates_dir) / filename).read_text(encoding="utf-8")
    return (
        resources.files("recapkit").joinpath("templates", filename).read_text("utf-8")
    )


def wrap_recap(text: str, tags: RecapTags = DEFAULT_TAGS) -> str:
    return f"{tags.open}{text}{tags.close}"


def unwrap_recap(wrapped: str, tags: RecapTags = DEFAULT_TAGS) -> str:
    if not (wrapped.startswith(tags.open) and wrapped.endswith(tags.close)):
        raise ValueError(f"not a wrapped recap: {wrapped!r}")
    return wrapped[len(tags.open) : len(wrapped) - len(tags.close)]


def strip_tag_literals(text: str, tags: RecapTags = DEFAULT_TAGS) -> str:
    return text.replace(tags.open, "").replace(tags.close, "")


def truncate_sentences(text: str, limit: int = MAX_RECAP_SENTENCES) -> str:
    pieces = split_sentences(text)
    if len(pieces) <= limit:
        return text
    return "".join(pieces[:limit]).rstrip()


def refine_segment(
    provider: LmProvider,
    segment_text: str,
    template: str,
    *,
    max_new_tokens: int = 192,
    tags: RecapTags = DEFAULT_TAGS,
) -> str:
    """Rephrase a mined segment into a recap of at most six sentences.

    Empty generations fall back to the segment's own leading sentences,
    verbatim, so mining never dead-ends on a reluctant generator.
    """
    prompt = template.format(segment=segment_text)
    request = GenerationRequest(
        prompt=provider.tokenize(prompt).tokens,
        max_new_tokens=max_new_tokens,
        stop_sequences=((tags.close,),),
    )
    try:
        raw = provider.generate(request)
    except GenerationEmpty:
        logger.warning("refine generation came back empty; using segment head")
        raw = ""
    refined = strip_tag_literals(raw, tags).strip()
    if not refined:
        refined = "".join(split_sentences(segment_text)[:MAX_RECAP_SENTENCES]).strip()
    return truncate_sentences(refined)


def build_training_sequence(
    doc: TokenizedDocument,
    recaps: Sequence[RecapEntry],
    tags: RecapTags = DEFAULT_TAGS,
) -> CorpusRecord:
    """Insert recaps into the document at their sentence-start positions.

    Entries landing on the same insertion point are resolved by keeping the
    one with the larger gap (logged). The augmented text strips back to the
    original exactly.
    """
    if tags.open in doc.text or tags.close in doc.text:
        raise TaggedInputError(f"document {doc.doc_id!r} already contains recap tags")
    starts = set(doc.sentence_starts)
    for entry in recaps:
        if entry.insertion_position not in starts:
            raise ValueError(
                f"insertion position {entry.insertion_position} is not a sentence start"
            )
        if tags.open in entry.refined_text or tags.close in entry.refined_text:
            raise ValueError("refined recap text must not contain tag literals")
    chosen: dict[int, RecapEntry] = {}
    for entry in recaps:
        incumbent = chosen.get(entry.insertion_position)
        if incumbent is not None:
            logger.warning(
                "two recaps at position %d; keeping the larger-gap one",
                entry.insertion_position,
            )
        if incumbent is None or entry.log_gap > incumbent.log_gap:
            chosen[entry.insertion_position] = entry
    ordered = [chosen[pos] for pos in sorted(chosen)]
    parts: list[str] = []
    cursor = 0
    for entry in ordered:
        offset = doc.spans[entry.insertion_position][0]
        parts.append(doc.text[cursor:offset])
        parts.append(wrap_recap(entry.refined_text, tags) + "\n")
        cursor = offset
    parts.append(doc.text[cursor:])
    augmented = "".join(parts)
    recap_dicts = tuple(
        {
            "insertion_position": e.insertion_position,
            "segment_start": e.segment_start,
            "segment_end": e.segment_end,
            "refined_text": e.refined_text,
            "log_gap": e.log_gap,
        }
        for e in ordered
    )
    return CorpusRecord(
        doc_id=doc.doc_id,
        original_text=doc.text,
        augmented_text=augmented,
        recaps=recap_dicts,
    )


def strip_recaps(text: str, tags: RecapTags = DEFAULT_TAGS) -> str:
    """Remove every ``<re>...</re>\\n`` block; inverse of insertion."""
    pattern = re.escape(tags.open) + r".*?" + re.escape(tags.close) + r"\n"
    return re.sub(pattern, "", text, flags=re.DOTALL)


def tags_balanced(text: str, tags: RecapTags = DEFAULT_TAGS) -> bool:
    """True when open/close tags strictly alternate, starting with open."""
    pattern = re.compile(
        f"({re.escape(tags.open)})|({re.escape(tags.close)})"
    )
    expecting_open = True
    for m in pattern.finditer(text):
        is_open = m.group(1) is not None
        if is_open != expecting_open:
            return False
        expecting_open = not expecting_open
    return expecting_open


def write_corpus(records: Iterable[CorpusRecord], path: str | Path) -> int:
    count = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.as_dict(), ensure_ascii=False) + "\n")
            count += 1
    return count


def read_corpus(path: str | Path) -> Iterator[CorpusRecord]:
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield CorpusRecord.from_dict(json.loads(line))
