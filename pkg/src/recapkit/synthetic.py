"""Seeded synthetic corpora: filler documents, needle-recall tasks, and
planted-repeat documents for exercising the mining pipeline end to end.

Everything here is a pure function of its seed. Needle values embed the seed,
so values are unique across tasks; filler vocabulary is disjoint from needle
keys, values, and marker phrases by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

_SUBJECTS = (
    "the harbor", "the archive", "the lantern", "the orchard",
    "the workshop", "the garrison", "the library", "the foundry",
    "the market", "the causeway", "the granary", "the quarry",
)
_VERBS = (
    "sheltered", "recorded", "illuminated", "yielded", "assembled",
    "guarded", "catalogued", "forged", "traded", "spanned", "stored", "held",
)
_OBJECTS = (
    "a skiff", "a ledger", "a passage", "late apples", "a clockwork",
    "the gate", "old maps", "new blades", "river salt", "two channels",
    "winter grain", "pale stone",
)
_KEY_WORDS = (
    "amber", "basalt", "cobalt", "damson", "ember", "flint",
    "garnet", "hazel", "indigo", "jasper", "keel", "larch",
)

NEEDLE_MARKER = "secret code"


@dataclass(frozen=True)
class SyntheticTask:
    doc_id: str
    document: str
    needle_key: str
    needle_value: str
    needle_position: float
    question: str
    expected_answer: str


@dataclass(frozen=True)
class PlantedRepeatDocument:
    """A document where a distinctive token pair occurs once early and repeats
    far later — beyond any plausible recency window."""

    doc_id: str
    text: str
    pair: tuple[str, str]
    first_start: int  # token index of the pair's first occurrence
    first_end: int  # exclusive
    key_position: int  # index of the repeated pair's second token


def _filler_sentence_tokens(rng: random.Random) -> list[str]:
    subject = rng.choice(_SUBJECTS)
    verb = rng.choice(_VERBS)
    obj = rng.choice(_OBJECTS)
    site = f"w{rng.randrange(100000)}"
    return f"{subject} {verb} {obj} beside {site}.".split()


def _filler_sentence(rng: random.Random) -> str:
    return " ".join(_filler_sentence_tokens(rng))


def generate_document(seed: int, n_sentences: int) -> str:
    """A filler document with exactly n_sentences sentences."""
    if n_sentences < 1:
        raise ValueError("n_sentences must be >= 1")
    rng = random.Random(seed)
    return " ".join(_filler_sentence(rng) for _ in range(n_sentences))


def needle_sentence(key: str, value: str) -> str:
    return f"The {NEEDLE_MARKER} for {key} is {value}."


def needle_question(key: str) -> str:
    return f"What is the {NEEDLE_MARKER} for {key}?"


def generate_synthetic(
    seed: int, length_tokens: int = 400, needle_position: float = 0.5
) -> SyntheticTask:
    """A needle-recall task: one fact sentence planted in seeded filler.

    The value appears exactly once and is unique per seed; the question asks
    for it back. ``needle_position`` places the fact as a fraction of the
    document (0.0 = first sentence, 1.0 = last).
    """
    if length_tokens < 50:
        raise ValueError("length_tokens must be >= 50")
    if not 0.0 <= needle_position <= 1.0:
        raise ValueError("needle_position must be in [0, 1]")
    rng = random.Random(seed)
    key = f"{rng.choice(_KEY_WORDS)}-{rng.choice(_KEY_WORDS)}"
    value = f"v{seed}x{rng.randrange(100000):05d}"
    needle = needle_sentence(key, value)
    needle_len = len(needle.split())
    sentences: list[str] = []
    total = needle_len
    while total < length_tokens:
        sentence = _filler_sentence(rng)
        sentences.append(sentence)
        total += len(sentence.split())
    insert_at = min(len(sentences), round(needle_position * len(sentences)))
    sentences.insert(insert_at, needle)
    return SyntheticTask(
        doc_id=f"needle-{seed}",
        document=" ".join(sentences),
        needle_key=key,
        needle_value=value,
        needle_position=needle_position,
        question=needle_question(key),
        expected_answer=value,
    )


def generate_planted_repeat(
    seed: int,
    *,
    short_window: int = 16,
    lead_sentences: int = 2,
    margin_tokens: int = 8,
) -> PlantedRepeatDocument:
    """A document whose distinctive pair ``X Y`` appears early inside one
    sentence and repeats near the end, with the first occurrence strictly
    before ``key_position - short_window``. The repeated second token is
    predictable from the far history and from nothing else."""
    rng = random.Random(seed)
    x = f"qv{seed}r"
    y = f"kz{seed}m"
    tokens: list[str] = []
    for _ in range(lead_sentences):
        tokens.extend(_filler_sentence_tokens(rng))
    first_start = len(tokens) + 2
    tokens.extend(["witnesses", "noted", x, y, "during", "the", "survey."])
    first_end = first_start + 2
    while len(tokens) < first_end + short_window + margin_tokens:
        tokens.extend(_filler_sentence_tokens(rng))
    key_position = len(tokens) + 4
    tokens.extend(["records", "later", "showed", x, y, "once", "more."])
    return PlantedRepeatDocument(
        doc_id=f"planted-{seed}",
        text=" ".join(tokens),
        pair=(x, y),
        first_start=first_start,
        first_end=first_end,
        key_position=key_position,
    )
