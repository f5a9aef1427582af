"""
================================================================================
DESCRIPTIVE KEYPHRASES — Candidate and Sampling Tests
================================================================================
"""

import itertools

import pytest

from candidates import (
    Label,
    LabeledExample,
    Response,
    build_examples,
    enumerate_ngrams,
    filter_extractive,
    filter_funnel,
    filter_length,
    filter_spurious,
    group_by_assignment,
    load_responses,
    make_positives,
    sample_negatives,
)
from core.errors import CandidateError, SamplingError
from corpus_ingest import Corpus, make_document


class TestResponses:
    def test_load_fixture(self, responses, manifest):
        assert len(responses) == manifest["responses"]["raw"]
        assert len(group_by_assignment(responses)) == manifest["responses"]["assignments"]

    def test_na_strings_survive_csv_parsing(self, responses):
        phrases = {r.phrase for r in responses}
        assert {"N/A", "na", "nothing"} <= phrases

    def test_empty_phrases_dropped(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("doc_id,assignment_id,phrase\nd1,a1,\nd1,a1,  \nd1,a1,topic models\n", encoding='utf-8')
        loaded = load_responses(path)
        assert [r.phrase_tokens for r in loaded] == [("topic", "models")]

    def test_missing_column(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("doc_id,phrase\nd1,x\n", encoding='utf-8')
        with pytest.raises(CandidateError, match="assignment_id"):
            load_responses(path)


class TestFilters:
    def test_funnel_counts(self, responses, blocklist, foreground, manifest):
        kept, funnel = filter_funnel(responses, blocklist, foreground, max_words=5)
        expected = manifest["responses"]["funnel"]
        for stage in ("raw_responses", "unique_phrases", "unique_lowercased",
                      "after_spurious", "after_length", "after_extractive"):
            assert funnel[stage] == expected[stage], stage
        assert len(kept) == expected["after_extractive"]

    def test_blocklist_is_case_insensitive(self, foreground):
        rs = [Response.from_text("d01", "a", "NOTHING"), Response.from_text("d01", "a", "peer networks")]
        kept = filter_spurious(rs, {"nothing"}, foreground)
        assert [r.phrase for r in kept] == ["peer networks"]

    def test_title_equal_response_is_spurious(self, foreground):
        rs = [Response.from_text("d04", "a", "Auction Mechanisms")]
        assert filter_spurious(rs, set(), foreground) == []

    def test_length_filter_keeps_five_words(self):
        five = Response.from_text("d", "a", "one two three four five")
        six = Response.from_text("d", "a", "one two three four five six")
        assert filter_length([five, six], 5) == [five]

    def test_extractive_needs_contiguous_match(self, foreground):
        contiguous = Response.from_text("d07", "a", "random surfer")
        scattered = Response.from_text("d07", "a", "random model")
        assert filter_extractive([contiguous, scattered], foreground) == [contiguous]

    def test_extractive_unknown_document(self, foreground):
        with pytest.raises(CandidateError, match="unknown document"):
            filter_extractive([Response.from_text("d99", "a", "x")], foreground)

    def test_filters_commute(self, responses, blocklist, foreground):
        filters = [
            lambda rs: filter_spurious(rs, blocklist, foreground),
            lambda rs: filter_length(rs, 5),
            lambda rs: filter_extractive(rs, foreground),
        ]
        results = []
        for order in itertools.permutations(filters):
            kept = list(responses)
            for apply in order:
                kept = apply(kept)
            results.append(kept)
        assert all(result == results[0] for result in results)
        assert 0 < len(results[0]) < len(responses)


class TestPositives:
    def test_duplicates_across_assignments_collapse(self):
        rs = [Response.from_text("d1", "a1", "Topic Models"), Response.from_text("d1", "a2", "topic models")]
        positives = make_positives(rs)
        assert len(positives) == 1
        assert positives[0].label is Label.POSITIVE
        assert positives[0].weight == 1.0

    def test_example_validation(self):
        with pytest.raises(CandidateError):
            LabeledExample("d1", (), Label.NEGATIVE, 0.1)
        with pytest.raises(CandidateError):
            LabeledExample("d1", ("x",), Label.NEGATIVE, -1.0)

    def test_example_dict_round_trip(self):
        example = LabeledExample("d1", ("gibbs", "sampling"), Label.NEGATIVE, 0.1)
        assert LabeledExample.from_dict(example.to_dict()) == example
        assert Label.NEGATIVE.y == 0 and Label.POSITIVE.y == 1


class TestNegativeSampling:
    @pytest.fixture(scope="class")
    def examples(self, foreground, responses, blocklist):
        return build_examples(foreground, responses, blocklist, seed=13)

    def test_ratio_and_weights(self, examples, manifest):
        items, funnel = examples
        positives = [e for e in items if e.label is Label.POSITIVE]
        negatives = [e for e in items if e.label is Label.NEGATIVE]
        assert len(positives) == manifest["responses"]["funnel"]["positives"]
        assert len(negatives) == manifest["responses"]["funnel"]["negatives"]
        assert funnel["negatives"] == 10 * funnel["positives"]
        assert all(e.weight == pytest.approx(0.1) for e in negatives)

    def test_negatives_are_valid_ngrams(self, examples, foreground):
        items, _ = examples
        positive_keys = {e.key for e in items if e.label is Label.POSITIVE}
        negatives = [e for e in items if e.label is Label.NEGATIVE]
        assert len({e.key for e in negatives}) == len(negatives)
        for e in negatives:
            assert e.key not in positive_keys
            assert 1 <= len(e.phrase_tokens) <= 5
            assert e.phrase_tokens in enumerate_ngrams(foreground[e.doc_id])

    def test_same_seed_same_sample(self, foreground, responses, blocklist, examples):
        again, _ = build_examples(foreground, responses, blocklist, seed=13)
        assert [e.key for e in again] == [e.key for e in examples[0]]

    def test_different_seed_different_sample(self, foreground, responses, blocklist, examples):
        other, _ = build_examples(foreground, responses, blocklist, seed=14)
        assert [e.key for e in other] != [e.key for e in examples[0]]

    def test_shortfall_raises(self):
        corpus = Corpus("foreground", (make_document("s1", "Tiny", "Two words."),))
        positives = [LabeledExample("s1", ("tiny",), Label.POSITIVE, 1.0)]
        # non-positive n-grams: two, words, tiny two, two words, tiny two words
        with pytest.raises(SamplingError, match="short by 5"):
            sample_negatives(corpus, positives, ratio=10)

    def test_ratio_below_one(self, foreground):
        with pytest.raises(SamplingError):
            sample_negatives(foreground, [], ratio=0)

    def test_enumerated_ngrams_respect_sentences(self, foreground):
        grams = enumerate_ngrams(foreground["d01"], 5)
        assert ("networks", "the") not in grams
        assert ("peer", "networks") in grams
