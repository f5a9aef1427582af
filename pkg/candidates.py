"""
================================================================================
DESCRIPTIVE KEYPHRASES — Candidates
================================================================================
Turns raw annotator responses into positive examples (spurious, length and
extractive filters), samples negative n-grams and enumerates candidates.
================================================================================
"""

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence, Set, Tuple

import numpy as np
import pandas as pd

from core.errors import CandidateError, SamplingError
from core.logger import get_logger
from core.utils import read_lines
from corpus_ingest import Corpus, Document, tokenize

logger = get_logger(__name__)

RESPONSE_COLUMNS = ("doc_id", "assignment_id", "phrase")
POSITIVE_WEIGHT = 1.0
NEGATIVE_WEIGHT = 0.1

Phrase = Tuple[str, ...]


class Label(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"

    @property
    def y(self) -> int:
        return 1 if self is Label.POSITIVE else 0


@dataclass(frozen=True)
class Response:
    doc_id: str
    assignment_id: str
    phrase: str
    phrase_tokens: Phrase

    @classmethod
    def from_text(cls, doc_id: str, assignment_id: str, phrase: str) -> "Response":
        return cls(doc_id, assignment_id, phrase,
                   tuple(t.lowercased for t in tokenize(phrase)))

    @property
    def word_count(self) -> int:
        return len(self.phrase_tokens)


@dataclass
class LabeledExample:
    doc_id: str
    phrase_tokens: Phrase
    label: Label
    weight: float
    features: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.phrase_tokens:
            raise CandidateError(f"{self.doc_id}: example with no tokens")
        if self.weight < 0:
            raise CandidateError(f"{self.doc_id}: negative weight {self.weight}")

    @property
    def phrase(self) -> str:
        return " ".join(self.phrase_tokens)

    @property
    def key(self) -> Tuple[str, Phrase]:
        return self.doc_id, self.phrase_tokens

    def to_dict(self) -> Dict:
        return {
            "doc_id": self.doc_id,
            "phrase_tokens": list(self.phrase_tokens),
            "label": self.label.value,
            "weight": self.weight,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "LabeledExample":
        return cls(data["doc_id"], tuple(data["phrase_tokens"]),
                   Label(data["label"]), float(data["weight"]))


# ==================== INPUT ====================

def load_responses(path: str | Path) -> List[Response]:
    """Read `doc_id,assignment_id,phrase` rows; empty phrases are dropped"""
    try:
        # keep_default_na=False: "N/A", "NA", "na" are responses, not missing values
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise CandidateError(f"Cannot read responses {path}: {e}")

    missing = [c for c in RESPONSE_COLUMNS if c not in frame.columns]
    if missing:
        raise CandidateError(f"Responses file {path} lacks column(s): {', '.join(missing)}")

    responses = []
    dropped = 0
    for row in frame.itertuples(index=False):
        if not row.phrase.strip():
            dropped += 1
            continue
        responses.append(Response.from_text(row.doc_id.strip(), row.assignment_id.strip(), row.phrase))
    if dropped:
        logger.warning(f"Dropped {dropped} empty response(s) from {path}", extra={"count": dropped})
    return responses


def normalize_phrase(phrase: str) -> str:
    return phrase.strip().casefold()


def load_blocklist(path: str | Path) -> Set[str]:
    try:
        return {normalize_phrase(line) for line in read_lines(path)}
    except OSError as e:
        raise CandidateError(f"Cannot read blocklist {path}: {e}")


# ==================== FILTERS ====================

def filter_spurious(responses: Iterable[Response], blocklist: Set[str],
                    documents: Mapping[str, Document] | Corpus) -> List[Response]:
    """Drop blocklisted responses and responses equal to their document's title or body"""
    kept = []
    for r in responses:
        if normalize_phrase(r.phrase) in blocklist:
            continue
        doc = documents.get(r.doc_id)
        if doc is not None and r.phrase_tokens and r.phrase_tokens in (doc.title_tokens, doc.body_tokens):
            continue
        kept.append(r)
    return kept


def filter_length(responses: Iterable[Response], max_words: int = 5) -> List[Response]:
    return [r for r in responses if r.word_count <= max_words]


def filter_extractive(responses: Iterable[Response],
                      documents: Mapping[str, Document] | Corpus) -> List[Response]:
    """Keep responses whose tokens occur contiguously in their own document"""
    kept = []
    for r in responses:
        doc = documents.get(r.doc_id)
        if doc is None:
            raise CandidateError(f"Response for unknown document '{r.doc_id}' ({r.assignment_id})")
        if doc.contains(r.phrase_tokens):
            kept.append(r)
    return kept


def filter_funnel(responses: Sequence[Response], blocklist: Set[str], documents: Corpus,
                  max_words: int = 5) -> Tuple[List[Response], Dict[str, int]]:
    """Apply the three filters in order and count survivors at each stage"""
    funnel = {
        "raw_responses": len(responses),
        "unique_phrases": len({r.phrase.strip() for r in responses}),
        "unique_lowercased": len({normalize_phrase(r.phrase) for r in responses}),
    }
    kept = filter_spurious(responses, blocklist, documents)
    funnel["after_spurious"] = len(kept)
    kept = filter_length(kept, max_words)
    funnel["after_length"] = len(kept)
    kept = filter_extractive(kept, documents)
    funnel["after_extractive"] = len(kept)
    return kept, funnel


def make_positives(responses: Iterable[Response], weight: float = POSITIVE_WEIGHT) -> List[LabeledExample]:
    """One positive per unique (doc_id, tokens) pair, sorted"""
    keys = sorted({(r.doc_id, r.phrase_tokens) for r in responses if r.phrase_tokens})
    return [LabeledExample(doc_id, tokens, Label.POSITIVE, weight) for doc_id, tokens in keys]


# ==================== CANDIDATES ====================

def enumerate_ngrams(document: Document, n_max: int = 5) -> Set[Phrase]:
    """Distinct lowercased n-grams (1..n_max) that cross no sentence boundary"""
    return {gram for gram, _ in document.iter_sentence_ngrams(n_max)}


def sample_negatives(corpus: Corpus, positives: Sequence[LabeledExample], ratio: int = 10,
                     seed: int = 0, n_max: int = 5,
                     weight: float = NEGATIVE_WEIGHT) -> List[LabeledExample]:
    """
    Draw ratio x |positives| negatives uniformly, without replacement, from
    the distinct (doc_id, n-gram) pairs that are not positives.
    """
    if ratio < 1:
        raise SamplingError(f"negative ratio must be >= 1, got {ratio}")

    positive_keys = {p.key for p in positives}
    universe = sorted(
        (doc.id, gram)
        for doc in corpus
        for gram in enumerate_ngrams(doc, n_max)
        if (doc.id, gram) not in positive_keys
    )
    needed = ratio * len(positives)
    if needed > len(universe):
        raise SamplingError(
            f"need {needed} negatives but only {len(universe)} distinct non-positive "
            f"n-grams exist (short by {needed - len(universe)})"
        )

    rng = np.random.default_rng(seed)
    picks = np.sort(rng.choice(len(universe), size=needed, replace=False))
    negatives = [LabeledExample(*universe[i], Label.NEGATIVE, weight) for i in picks]
    logger.info(f"Sampled {len(negatives)} negatives from {len(universe)} candidates",
                extra={"count": len(negatives)})
    return negatives


def build_examples(corpus: Corpus, responses: Sequence[Response], blocklist: Set[str],
                   max_words: int = 5, ratio: int = 10, seed: int = 0, n_max: int = 5,
                   positive_weight: float = POSITIVE_WEIGHT,
                   negative_weight: float = NEGATIVE_WEIGHT,
                   ) -> Tuple[List[LabeledExample], Dict[str, int]]:
    """Positives then negatives, with the filter funnel counts"""
    kept, funnel = filter_funnel(responses, blocklist, corpus, max_words)
    positives = make_positives(kept, positive_weight)
    negatives = sample_negatives(corpus, positives, ratio, seed, n_max, negative_weight)
    funnel["positives"] = len(positives)
    funnel["negatives"] = len(negatives)
    return positives + negatives, funnel


def group_by_assignment(responses: Iterable[Response]) -> Dict[str, List[Response]]:
    groups: Dict[str, List[Response]] = {}
    for r in responses:
        groups.setdefault(r.assignment_id, []).append(r)
    return groups
