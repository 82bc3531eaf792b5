"""Tokenization and the sentence-boundary rule, in both views."""

import string

import pytest
from hypothesis import given, strategies as st

from recapkit.synthetic import generate_document
from recapkit.text import (
    detokenize,
    sentence_start_indices,
    split_sentences,
    whitespace_tokenize,
)


def test_tokenize_spans_cover_tokens():
    text = "alpha  beta.\n gamma\tdelta"
    tok = whitespace_tokenize(text)
    assert tok.tokens == ("alpha", "beta.", "gamma", "delta")
    for token, (start, end) in zip(tok.tokens, tok.spans):
        assert text[start:end] == token


def test_tokenize_empty_and_whitespace_only():
    assert whitespace_tokenize("").tokens == ()
    assert whitespace_tokenize(" \n\t ").tokens == ()


def test_detokenize_round_trip_on_normalized_text():
    tokens = ("a", "b.", "c?")
    assert whitespace_tokenize(detokenize(tokens)).tokens == tokens


def test_sentence_starts_punctuation_rule():
    text = "one two. three four! five? six"
    tok = whitespace_tokenize(text)
    starts = sentence_start_indices(text, tok.tokens, tok.spans)
    assert starts == [0, 2, 4, 5]


def test_sentence_starts_newline_separator():
    text = "alpha beta\ngamma delta"
    tok = whitespace_tokenize(text)
    assert sentence_start_indices(text, tok.tokens, tok.spans) == [0, 2]


def test_mid_token_punctuation_is_not_a_boundary():
    # '.' inside a token (a.b) and a final '.' with nothing after: no breaks
    text = "a.b c d."
    tok = whitespace_tokenize(text)
    assert sentence_start_indices(text, tok.tokens, tok.spans) == [0]


def test_index_zero_always_starts_a_sentence():
    tok = whitespace_tokenize("word")
    assert sentence_start_indices("word", tok.tokens, tok.spans) == [0]


def test_split_sentences_lossless_simple():
    text = "one two. three four! five"
    pieces = split_sentences(text)
    assert pieces == ["one two. ", "three four! ", "five"]
    assert "".join(pieces) == text


def test_split_sentences_counts_match_generator():
    for seed, n in [(0, 1), (1, 5), (2, 50)]:
        assert len(split_sentences(generate_document(seed, n))) == n


def test_split_sentences_agrees_with_token_rule():
    text = "alpha beta.  gamma\ndelta epsilon? zeta"
    pieces = split_sentences(text)
    tok = whitespace_tokenize(text)
    starts = sentence_start_indices(text, tok.tokens, tok.spans)
    assert len(pieces) == len(starts)
    # each piece begins at the span of its sentence-start token
    offset = 0
    for piece, k in zip(pieces, starts):
        assert offset == 0 or tok.spans[k][0] == offset
        offset += len(piece)


@given(
    st.text(
        alphabet=string.ascii_lowercase + " .!?\n\t",
        max_size=300,
    )
)
def test_split_sentences_concatenates_to_input(text):
    assert "".join(split_sentences(text)) == text


@given(st.text(alphabet="ab .!?\n", max_size=200))
def test_split_piece_count_equals_sentence_start_count(text):
    tok = whitespace_tokenize(text)
    starts = sentence_start_indices(text, tok.tokens, tok.spans)
    pieces = split_sentences(text)
    if tok.tokens:
        assert len(pieces) == len(starts)
    else:
        assert pieces == ([text] if text else [])


def test_split_sentences_empty():
    assert split_sentences("") == []


def test_whitespace_only_text_is_one_piece():
    assert split_sentences("  \n ") == ["  \n "]
