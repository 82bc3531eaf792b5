"""Seeded generators: determinism, needle uniqueness, planted-pair geometry."""

import pytest

from recapkit.synthetic import (
    NEEDLE_MARKER,
    generate_document,
    generate_planted_repeat,
    generate_synthetic,
    needle_question,
    needle_sentence,
)


class TestFillerDocuments:
    def test_deterministic_in_seed(self):
        assert generate_document(4, 25) == generate_document(4, 25)
        assert generate_document(4, 25) != generate_document(5, 25)

    def test_sentence_count(self):
        doc = generate_document(1, 17)
        assert doc.count(".") == 17

    def test_filler_never_contains_the_marker(self):
        assert NEEDLE_MARKER not in generate_document(0, 200)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            generate_document(0, 0)


class TestNeedleTasks:
    def test_deterministic_in_seed(self):
        a = generate_synthetic(11, length_tokens=200, needle_position=0.4)
        b = generate_synthetic(11, length_tokens=200, needle_position=0.4)
        assert a == b

    def test_value_appears_exactly_once(self):
        task = generate_synthetic(3, length_tokens=600)
        assert task.document.count(task.needle_value) == 1
        assert needle_sentence(task.needle_key, task.needle_value) in task.document

    def test_values_unique_across_seeds(self):
        values = {generate_synthetic(s, length_tokens=100).needle_value for s in range(80)}
        assert len(values) == 80

    def test_question_and_answer_wiring(self):
        task = generate_synthetic(9)
        assert task.question == needle_question(task.needle_key)
        assert task.expected_answer == task.needle_value
        assert NEEDLE_MARKER in task.question
        assert task.expected_answer not in task.question

    def test_length_at_least_target(self):
        for seed, target in ((0, 50), (1, 120), (2, 999)):
            task = generate_synthetic(seed, length_tokens=target)
            assert len(task.document.split()) >= target

    @pytest.mark.parametrize("fraction", [0.0, 0.25, 0.5, 0.75, 1.0])
    def test_needle_lands_near_requested_fraction(self, fraction):
        task = generate_synthetic(2, length_tokens=900, needle_position=fraction)
        tokens = task.document.split()
        at = next(i for i, t in enumerate(tokens) if task.needle_value in t)
        assert abs(at / len(tokens) - fraction) < 0.1

    def test_validation(self):
        with pytest.raises(ValueError):
            generate_synthetic(0, length_tokens=10)
        with pytest.raises(ValueError):
            generate_synthetic(0, needle_position=1.5)


class TestPlantedRepeat:
    def test_deterministic_in_seed(self):
        assert generate_planted_repeat(6) == generate_planted_repeat(6)

    @pytest.mark.parametrize("seed", range(10))
    def test_pair_geometry(self, seed):
        planted = generate_planted_repeat(seed, short_window=16)
        tokens = planted.text.split()
        x, y = planted.pair
        assert tokens[planted.first_start : planted.first_end] == [x, y]
        assert tokens[planted.key_position - 1 : planted.key_position + 1] == [x, y]
        # the first occurrence sits strictly outside the recency window
        assert planted.first_end <= planted.key_position - 16
        # the pair occurs exactly twice
        assert tokens.count(x) == 2 and tokens.count(y) == 2

    def test_wider_window_pushes_pair_further_out(self):
        planted = generate_planted_repeat(0, short_window=64)
        assert planted.first_end <= planted.key_position - 64
