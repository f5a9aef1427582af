"""
================================================================================
DESCRIPTIVE KEYPHRASES — Frequency & Probabilistic Features
================================================================================
Term-weighting statistics of a candidate against the background corpus:

    log_tf    ln(t_doc)                      (0 when t_doc = 0)
    tf_idf    (t_doc / t_ref) * ln(N / D)
    g2        Dunning log-likelihood ratio, document vs. reference rates
    bm25      ((k1+1) t_doc) / (t_doc + k1 ((1-b) + b T_doc / r)) * ln(N / D)
    log_odds  smoothed, variance-normalized log-odds ratio

Natural logarithms throughout. Foreground documents are never part of the
reference counts; unseen terms get t_ref = D = smoothing increment.
================================================================================
"""

import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Sequence

from scipy.special import xlogy

from commonness import NgramIndex
from corpus_ingest import Document

FREQUENCY_FEATURES = ("log_tf", "tf_idf", "g2", "bm25", "log_odds")


@dataclass(frozen=True)
class FrequencyFeatureConfig:
    bm25_k1: float = 2.0
    bm25_b: float = 0.75
    smoothing_increment: float = 0.01

    def __post_init__(self):
        if self.bm25_k1 <= 0:
            raise ValueError(f"bm25_k1 must be positive, got {self.bm25_k1}")
        if not 0 <= self.bm25_b <= 1:
            raise ValueError(f"bm25_b must be in [0, 1], got {self.bm25_b}")
        if self.smoothing_increment <= 0:
            raise ValueError("smoothing_increment must be positive")


DEFAULT_CONFIG = FrequencyFeatureConfig()


@dataclass(frozen=True)
class TermStatistics:
    """Counts for one term; v_doc / v_notdoc are same-order vocabulary sizes"""
    t_doc: float
    t_ref: float
    T_doc: float
    T_ref: float
    N: float
    D: float
    r: float
    v_doc: int = 0
    v_notdoc: int = 0

    @property
    def t_notdoc(self) -> float:
        return max(self.t_ref - self.t_doc, 0.0)

    @property
    def T_notdoc(self) -> float:
        return max(self.T_ref - self.T_doc, 0.0)

    def smoothed_t_ref(self, eps: float) -> float:
        return self.t_ref if self.t_ref > 0 else eps

    def smoothed_D(self, eps: float) -> float:
        return self.D if self.D > 0 else eps


@dataclass(frozen=True)
class DocumentTermCounts:
    """Within-sentence n-gram counts of one document, computed once"""
    counts: Counter
    vocabulary: Dict[int, int]
    token_count: int

    @classmethod
    def from_document(cls, document: Document, n_max: int = 5) -> "DocumentTermCounts":
        counts = document.ngram_counts(n_max)
        vocabulary = Counter(len(term) for term in counts)
        return cls(counts, dict(vocabulary), document.token_count)


def term_statistics(term: Sequence[str], doc_counts: DocumentTermCounts,
                    index: NgramIndex) -> TermStatistics:
    term = tuple(term)
    return TermStatistics(
        t_doc=doc_counts.counts.get(term, 0),
        t_ref=index.tf(term),
        T_doc=doc_counts.token_count,
        T_ref=index.total_tokens,
        N=index.num_documents,
        D=index.df(term),
        r=index.average_document_length,
        v_doc=doc_counts.vocabulary.get(len(term), 0),
        v_notdoc=index.vocabulary_size(len(term)),
    )


# ==================== FORMULAS ====================

def log_tf(stats: TermStatistics) -> float:
    return math.log(stats.t_doc) if stats.t_doc >= 1 else 0.0


def tf_idf(stats: TermStatistics, config: FrequencyFeatureConfig = DEFAULT_CONFIG) -> float:
    eps = config.smoothing_increment
    return (stats.t_doc / stats.smoothed_t_ref(eps)) * math.log(stats.N / stats.smoothed_D(eps))


def _llr_term(count: float, scope_total: float, t_ref: float, T_ref: float) -> float:
    # xlogy gives 0 * ln(0) = 0
    if scope_total <= 0:
        return 0.0
    return float(xlogy(count, count * T_ref / (scope_total * t_ref)))


def g_squared(stats: TermStatistics, config: FrequencyFeatureConfig = DEFAULT_CONFIG) -> float:
    t_ref = stats.smoothed_t_ref(config.smoothing_increment)
    return 2.0 * (
        _llr_term(stats.t_doc, stats.T_doc, t_ref, stats.T_ref)
        + _llr_term(stats.t_notdoc, stats.T_notdoc, t_ref, stats.T_ref)
    )


def bm25(stats: TermStatistics, config: FrequencyFeatureConfig = DEFAULT_CONFIG) -> float:
    if stats.r <= 0:
        raise ValueError("average reference document length must be positive")
    k1, b = config.bm25_k1, config.bm25_b
    idf = math.log(stats.N / stats.smoothed_D(config.smoothing_increment))
    if stats.t_doc == 0:
        return 0.0
    saturation = ((k1 + 1) * stats.t_doc) / (stats.t_doc + k1 * ((1 - b) + b * stats.T_doc / stats.r))
    return saturation * idf


def weighted_log_odds(stats: TermStatistics, config: FrequencyFeatureConfig = DEFAULT_CONFIG) -> float:
    """Log-odds of document vs. complement with every frequency incremented by eps"""
    eps = config.smoothing_increment
    t_doc = stats.t_doc + eps
    t_notdoc = stats.t_notdoc + eps
    T_doc = max(stats.T_doc + eps * stats.v_doc, eps)
    T_notdoc = max(stats.T_notdoc + eps * stats.v_notdoc, eps)
    numerator = math.log(t_doc / t_notdoc) - math.log(T_doc / T_notdoc)
    return numerator / math.sqrt(1.0 / t_doc + 1.0 / t_notdoc)


def frequency_features(stats: TermStatistics,
                       config: FrequencyFeatureConfig = DEFAULT_CONFIG) -> Dict[str, float]:
    return {
        "log_tf": log_tf(stats),
        "tf_idf": tf_idf(stats, config),
        "g2": g_squared(stats, config),
        "bm25": bm25(stats, config),
        "log_odds": weighted_log_odds(stats, config),
    }


def frequency_feature_vector(term: Sequence[str], document: Document, index: NgramIndex,
                             config: FrequencyFeatureConfig = DEFAULT_CONFIG,
                             doc_counts: DocumentTermCounts | None = None) -> Dict[str, float]:
    """The five named frequency features of term in document"""
    if doc_counts is None:
        doc_counts = DocumentTermCounts.from_document(document, index.n_max)
    return frequency_features(term_statistics(term, doc_counts, index), config)
