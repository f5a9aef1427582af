"""
================================================================================
DESCRIPTIVE KEYPHRASES — Exploratory Statistics
================================================================================
Descriptive statistics of annotator responses against the corpus: phrase
lengths, keyphrases per assignment, extractive share, first-sentence
coverage, grammatical categories of keyphrases and commonness histograms.

Each statistic states its population: "responses" counts every response,
"unique keyphrases" counts distinct (doc_id, lowercased tokens) pairs.
================================================================================
"""

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import pandas as pd

from candidates import Response, filter_extractive, group_by_assignment
from commonness import NgramIndex, commonness
from core.errors import AnalysisError
from core.logger import get_logger
from core.utils import percentage
from corpus_ingest import Corpus
from feature_pipeline import FLOAT_FORMAT
from grammar_features import DocumentGrammar

logger = get_logger(__name__)


@dataclass(frozen=True)
class Histogram:
    labels: List[str]
    counts: List[int]
    population: str = "responses"

    @property
    def total(self) -> int:
        return int(sum(self.counts))

    @property
    def percentages(self) -> List[float]:
        total = self.total
        return [percentage(c, total) for c in self.counts]

    def count(self, label: str) -> int:
        return self.counts[self.labels.index(label)]

    def percent(self, label: str) -> float:
        return self.percentages[self.labels.index(label)]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"bin": self.labels, "count": self.counts, "percentage": self.percentages})


# ==================== RESPONSES ====================

def phrase_length_histogram(responses: Iterable[Response], cap: int = 10) -> Histogram:
    """Responses per word length 1..cap plus an overflow bin; empty phrases excluded"""
    lengths = Counter(r.word_count for r in responses if r.word_count > 0)
    labels = [str(n) for n in range(1, cap + 1)] + [f">{cap}"]
    counts = [lengths.get(n, 0) for n in range(1, cap + 1)]
    counts.append(sum(c for n, c in lengths.items() if n > cap))
    return Histogram(labels, counts, "responses")


def long_phrase_percentage(responses: Sequence[Response], max_words: int = 5) -> float:
    """Share of (non-empty) responses longer than max_words"""
    lengths = [r.word_count for r in responses if r.word_count > 0]
    return percentage(sum(1 for n in lengths if n > max_words), len(lengths))


def keyphrase_count_histogram(responses: Iterable[Response], low: int = 5, high: int = 16) -> Histogram:
    """Assignments per number of keyphrases submitted"""
    assignments = group_by_assignment(responses)
    if not assignments:
        raise AnalysisError("no assignments to count")
    sizes = Counter(len(group) for group in assignments.values())
    labels = [f"<{low}"] + [str(n) for n in range(low, high + 1)] + [f">{high}"]
    counts = [sum(c for n, c in sizes.items() if n < low)]
    counts += [sizes.get(n, 0) for n in range(low, high + 1)]
    counts.append(sum(c for n, c in sizes.items() if n > high))
    return Histogram(labels, counts, "assignments")


def extractive_fraction(responses: Sequence[Response], documents: Corpus) -> float:
    """Percentage of responses found contiguously in their own document"""
    if not responses:
        raise AnalysisError("no responses to measure")
    return percentage(len(filter_extractive(responses, documents)), len(responses))


@dataclass(frozen=True)
class FirstSentenceStats:
    keyphrases_in_first_sentence: float
    unique_terms_in_first_sentence: float
    responses_considered: int
    responses_in_first_sentence: int
    first_sentence_terms: int
    document_terms: int


def first_sentence_stats(responses: Sequence[Response], documents: Corpus) -> FirstSentenceStats:
    """
    Share of responses inside sentence 0 of their document, and share of each
    document's distinct unigrams that sentence 0 contains (pooled over documents).
    """
    considered = in_first = 0
    unknown = set()
    for r in responses:
        doc = documents.get(r.doc_id)
        if doc is None:
            unknown.add(r.doc_id)
            continue
        considered += 1
        if doc.sentences:
            start, end = doc.sentences[0]
            in_first += bool(doc.find_occurrences(r.phrase_tokens, start, end))
    if unknown:
        logger.warning(f"Skipped responses for {len(unknown)} unknown document(s): "
                       f"{', '.join(sorted(unknown))}", extra={"count": len(unknown)})

    first_terms = doc_terms = 0
    for doc in documents:
        if not doc.sentences:
            continue
        first_terms += len(set(doc.sentence_tokens(0)))
        doc_terms += len(set(doc.lowered))

    return FirstSentenceStats(
        keyphrases_in_first_sentence=percentage(in_first, considered),
        unique_terms_in_first_sentence=percentage(first_terms, doc_terms),
        responses_considered=considered,
        responses_in_first_sentence=in_first,
        first_sentence_terms=first_terms,
        document_terms=doc_terms,
    )


@dataclass(frozen=True)
class CategoryFractions:
    noun_phrase: float
    verb_phrase: float
    technical_term: float
    population: int
    skipped_documents: int


def grammatical_category_fractions(extractive_responses: Iterable[Response],
                                   documents: Corpus) -> CategoryFractions:
    """
    Shares of unique extractive keyphrases that are part of an NP chunk, a VP
    chunk and a technical term (first occurrence). Shares may sum past 100.
    """
    keys = sorted({(r.doc_id, r.phrase_tokens) for r in extractive_responses if r.phrase_tokens})
    grammars: Dict[str, Optional[DocumentGrammar]] = {}
    skipped = set()
    population = noun = verb = technical = 0
    for doc_id, tokens in keys:
        doc = documents.get(doc_id)
        if doc is None or doc.annotations is None:
            skipped.add(doc_id)
            continue
        occurrences = doc.find_occurrences(tokens)
        if not occurrences:
            continue
        if doc_id not in grammars:
            grammars[doc_id] = DocumentGrammar(doc)
        features = grammars[doc_id].features((occurrences[0], occurrences[0] + len(tokens)))
        population += 1
        noun += features.is_partial_np
        verb += features.is_partial_vp
        technical += features.is_partial_technical_term

    if skipped:
        logger.warning(f"{len(skipped)} document(s) without annotations skipped in category fractions",
                       extra={"count": len(skipped)})
    return CategoryFractions(
        noun_phrase=percentage(noun, population),
        verb_phrase=percentage(verb, population),
        technical_term=percentage(technical, population),
        population=population,
        skipped_documents=len(skipped),
    )


def commonness_histogram(responses: Iterable[Response], index: NgramIndex,
                         min_freq_cutoff: int = 0, num_bins: int = 20) -> Histogram:
    """Commonness of unique selected n-grams with tf_bg >= cutoff, equal-width bins"""
    if num_bins < 1:
        raise AnalysisError(f"histogram needs at least one bin, got {num_bins}")
    terms = sorted({r.phrase_tokens for r in responses if r.phrase_tokens})
    counts = [0] * num_bins
    for term in terms:
        if index.tf(term) < min_freq_cutoff:
            continue
        value = commonness(term, index)
        counts[min(int(math.floor(value * num_bins)), num_bins - 1)] += 1
    labels = [f"{i / num_bins:.2f}-{(i + 1) / num_bins:.2f}" for i in range(num_bins)]
    return Histogram(labels, counts, "unique phrases")


# ==================== CORPUS ====================

def sentence_count_summary(corpus: Corpus) -> Dict[str, float]:
    counts = pd.Series([len(doc.sentences) for doc in corpus], dtype=float)
    if counts.empty:
        raise AnalysisError("empty corpus")
    return {
        "documents": int(counts.size),
        "mean": float(counts.mean()),
        "median": float(counts.median()),
        "std": float(counts.std()) if counts.size > 1 else 0.0,
    }


def write_histogram(histogram: Histogram, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    histogram.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path
