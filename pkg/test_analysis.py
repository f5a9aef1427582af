"""
================================================================================
DESCRIPTIVE KEYPHRASES — Exploratory Statistics Tests
================================================================================
"""

import pytest

from analysis import (
    Histogram,
    commonness_histogram,
    extractive_fraction,
    first_sentence_stats,
    grammatical_category_fractions,
    keyphrase_count_histogram,
    long_phrase_percentage,
    phrase_length_histogram,
    sentence_count_summary,
    write_histogram,
)
from candidates import Response, filter_funnel
from core.errors import AnalysisError
from corpus_ingest import Corpus


@pytest.fixture(scope="module")
def kept(responses, blocklist, foreground):
    return filter_funnel(responses, blocklist, foreground)[0]


class TestResponseStatistics:
    def test_phrase_length_histogram(self, responses, manifest):
        histogram = phrase_length_histogram(responses)
        assert histogram.labels[-1] == ">10"
        assert dict(zip(histogram.labels, histogram.counts)) == manifest["responses"]["phrase_length"]
        assert histogram.total == 60

    def test_phrase_length_overflow_bin(self):
        long_one = Response.from_text("d", "a", " ".join(["w"] * 12))
        histogram = phrase_length_histogram([long_one], cap=10)
        assert histogram.count(">10") == 1

    def test_long_phrase_percentage(self, responses):
        assert long_phrase_percentage(responses) == pytest.approx(100 * 4 / 60)

    def test_keyphrase_count_histogram(self, responses, manifest):
        histogram = keyphrase_count_histogram(responses)
        assert histogram.labels[0] == "<5" and histogram.labels[-1] == ">16"
        assert len(histogram.labels) == 14
        for label, count in manifest["responses"]["keyphrase_count"].items():
            assert histogram.count(label) == count
        assert histogram.total == 10
        assert histogram.percent("5") == pytest.approx(40.0)

    def test_keyphrase_count_needs_assignments(self):
        with pytest.raises(AnalysisError):
            keyphrase_count_histogram([])

    def test_extractive_fraction(self, responses, foreground):
        assert extractive_fraction(responses, foreground) == pytest.approx(100 * 46 / 60)

    def test_extractive_fraction_needs_responses(self, foreground):
        with pytest.raises(AnalysisError):
            extractive_fraction([], foreground)

    def test_first_sentence_stats(self, responses, foreground, manifest):
        stats = first_sentence_stats(responses, foreground)
        expected = manifest["responses"]
        assert stats.responses_considered == 60
        assert stats.responses_in_first_sentence == expected["in_first_sentence"]
        assert stats.keyphrases_in_first_sentence == pytest.approx(45.0)
        assert stats.first_sentence_terms == expected["first_sentence_terms"]
        assert stats.document_terms == expected["document_terms"]
        assert stats.unique_terms_in_first_sentence == pytest.approx(100 * 104 / 182)

    def test_first_sentence_skips_unknown_documents(self, foreground):
        stats = first_sentence_stats([Response.from_text("zz", "a", "peer networks")], foreground)
        assert stats.responses_considered == 0
        assert stats.keyphrases_in_first_sentence == 0.0


class TestCorpusStatistics:
    def test_grammatical_categories(self, kept, foreground, manifest):
        fractions = grammatical_category_fractions(kept, foreground)
        grammar = manifest["responses"]["grammar"]
        assert fractions.population == grammar["population"]
        assert fractions.noun_phrase == pytest.approx(100 * grammar["noun_phrase"] / 42)
        assert fractions.verb_phrase == pytest.approx(100 * grammar["verb_phrase"] / 42)
        assert fractions.technical_term == pytest.approx(100 * grammar["technical_term"] / 42)
        assert fractions.skipped_documents == 0

    def test_categories_skip_unannotated_documents(self, kept, foreground):
        bare = Corpus("bare", tuple(doc for doc in foreground if doc.id != "d01") +
                      (foreground["d01"].with_annotations(None),))
        fractions = grammatical_category_fractions(kept, bare)
        assert fractions.skipped_documents == 1
        assert fractions.population == 42 - sum(1 for r in kept if r.doc_id == "d01")

    def test_commonness_histogram(self, kept, index):
        unfiltered = commonness_histogram(kept, index, min_freq_cutoff=0, num_bins=20)
        assert unfiltered.total == 42
        assert unfiltered.labels[0] == "0.00-0.05" and unfiltered.labels[-1] == "0.95-1.00"
        totals = [commonness_histogram(kept, index, cutoff).total for cutoff in (0, 1, 2, 5, 10)]
        assert totals == sorted(totals, reverse=True)
        assert totals[1] >= 1

    def test_commonness_histogram_bins(self, kept, index):
        with pytest.raises(AnalysisError):
            commonness_histogram(kept, index, num_bins=0)

    def test_sentence_count_summary(self, foreground):
        summary = sentence_count_summary(foreground)
        assert summary == {"documents": 10, "mean": 2.0, "median": 2.0, "std": 0.0}

    def test_sentence_count_summary_empty(self):
        with pytest.raises(AnalysisError):
            sentence_count_summary(Corpus("empty", ()))

    def test_write_histogram(self, tmp_path):
        path = write_histogram(Histogram(["a", "b"], [1, 3]), tmp_path / "h.csv")
        lines = path.read_text(encoding='utf-8').splitlines()
        assert lines == ["bin,count,percentage", "a,1,25", "b,3,75"]
