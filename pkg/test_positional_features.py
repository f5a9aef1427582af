"""
================================================================================
DESCRIPTIVE KEYPHRASES — Positional Feature Tests
================================================================================
"""

import pytest

from corpus_ingest import make_document
from positional_features import (
    ABSENT,
    POSITIONAL_FEATURES,
    PositionalFeatures,
    absolute_first_occurrence,
    in_first_sentence,
    positional_features,
    relative_first_occurrence,
)


class TestPositional:
    def test_single_occurrence(self, foreground):
        features = positional_features(("peer", "networks"), foreground["d01"])
        assert features.absolute_first_occurrence == pytest.approx(10 / 20)
        assert features.relative_first_occurrence == pytest.approx(0.5)
        assert features.in_first_sentence == 1
        assert features.occurrence_count == 1

    def test_repeated_term_decays_with_count(self, foreground):
        features = positional_features(("protocol",), foreground["d01"])
        assert features.occurrence_count == 2
        assert features.absolute_first_occurrence == pytest.approx(8 / 20)
        assert features.relative_first_occurrence == pytest.approx(0.6 ** 2)

    def test_second_sentence(self, foreground):
        doc = foreground["d01"]
        assert in_first_sentence(("logarithmic", "time"), doc) == 0
        assert absolute_first_occurrence(("logarithmic", "time"), doc) == pytest.approx(18 / 20)

    def test_title_phrase_starts_at_zero(self, foreground):
        features = positional_features(("distributed", "hash", "tables"), foreground["d01"])
        assert features.absolute_first_occurrence == 0.0
        assert features.relative_first_occurrence == 1.0

    def test_absent_phrase_sentinel(self, foreground):
        features = positional_features(("overlay", "routing"), foreground["d01"])
        assert features is ABSENT
        assert features.to_dict() == {
            "absolute_first_occurrence": 1.0,
            "relative_first_occurrence": 0.0,
            "in_first_sentence": 0,
        }

    def test_ranges_over_fixture(self, foreground):
        for doc in foreground:
            for gram, _ in doc.iter_sentence_ngrams(5):
                features = positional_features(gram, doc)
                assert 0.0 <= features.absolute_first_occurrence < 1.0
                assert 0.0 < features.relative_first_occurrence <= 1.0
                assert features.in_first_sentence in (0, 1)

    def test_relative_validation(self):
        assert relative_first_occurrence(0.0, 3) == 1.0
        with pytest.raises(ValueError):
            relative_first_occurrence(0.5, 0)
        with pytest.raises(ValueError):
            relative_first_occurrence(1.5, 1)

    def test_names(self):
        assert list(PositionalFeatures().to_dict()) == list(POSITIONAL_FEATURES)

    def test_relative_is_monotone(self):
        grid = [i / 20 for i in range(21)]
        for k in range(1, 8):
            values = [relative_first_occurrence(a, k) for a in grid]
            assert all(later <= earlier for earlier, later in zip(values, values[1:]))
        for a in grid:
            values = [relative_first_occurrence(a, k) for k in range(1, 8)]
            assert all(later <= earlier for earlier, later in zip(values, values[1:]))

    def test_first_sentence_implies_early_occurrence(self, foreground):
        for doc in foreground:
            s0_end = doc.sentences[0][1]
            for gram, _ in doc.iter_sentence_ngrams(5):
                if in_first_sentence(gram, doc):
                    assert absolute_first_occurrence(gram, doc) < s0_end / doc.token_count

    def test_decimal_stays_in_first_sentence(self):
        doc = make_document("v", "Fast Protocols", "Version 2.0 of the protocol is faster. Tests follow.")
        assert in_first_sentence(("protocol",), doc) == 1
        assert in_first_sentence(("tests",), doc) == 0
