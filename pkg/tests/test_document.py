"""Document model: spans, sentence starts, context slices, loaders."""

import json

import pytest

from recapkit import ContextConfig, TokenizedDocument, long_context, short_context
from recapkit.document import read_documents
from recapkit.synthetic import generate_document


@pytest.fixture
def doc(m2) -> TokenizedDocument:
    return TokenizedDocument.from_text(
        "one two. three four five. six seven", m2, "sample"
    )


def test_from_text_basics(doc, m2):
    assert doc.tokens == ("one", "two.", "three", "four", "five.", "six", "seven")
    assert doc.sentence_starts == (0, 2, 5)
    assert doc.provider_id == m2.provider_id
    assert len(doc) == 7


def test_slice_text_is_original_text(doc):
    assert doc.slice_text(2, 5) == "three four five."
    assert doc.slice_text(0, len(doc)) == doc.text
    assert doc.slice_text(3, 3) == ""


def test_sentence_start_lookups(doc):
    assert doc.sentence_start_at_or_before(4) == 2
    assert doc.sentence_start_at_or_before(2) == 2
    assert doc.sentence_start_at_or_after(3) == 5
    assert doc.sentence_start_at_or_after(5) == 5
    assert doc.sentence_start_at_or_after(6) is None


def test_context_slices(doc):
    cfg = ContextConfig(short_window=2)
    assert short_context(doc, 5, cfg) == ("four", "five.")
    assert long_context(doc, 5, cfg) == ("one", "two.", "three", "four", "five.")
    bounded = ContextConfig(short_window=2, long_window=3)
    assert long_context(doc, 5, bounded) == ("three", "four", "five.")


def test_context_at_document_start(doc):
    cfg = ContextConfig(short_window=4)
    assert short_context(doc, 2, cfg) == ("one", "two.")
    assert long_context(doc, 0, cfg) == ()


def test_context_config_validation():
    with pytest.raises(ValueError):
        ContextConfig(short_window=0)
    with pytest.raises(ValueError):
        ContextConfig(short_window=10, long_window=5)


def test_generated_document_sentence_count(m2):
    doc = TokenizedDocument.from_text(generate_document(3, 50), m2, "gen")
    assert len(doc.sentence_starts) == 50


def test_read_documents_jsonl(tmp_path):
    path = tmp_path / "corpus.jsonl"
    rows = [{"id": "a", "text": "alpha one."}, {"id": "b", "text": "beta two."}]
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    assert list(read_documents(path)) == [("a", "alpha one."), ("b", "beta two.")]


def test_read_documents_plain_text(tmp_path):
    path = tmp_path / "note.txt"
    path.write_text("just some text", encoding="utf-8")
    assert list(read_documents(path)) == [("note", "just some text")]


def test_read_documents_jsonl_missing_id_gets_synthesized(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text('{"text": "only text."}\n', encoding="utf-8")
    [(doc_id, text)] = list(read_documents(path))
    assert text == "only text."
    assert doc_id == "c-0"
