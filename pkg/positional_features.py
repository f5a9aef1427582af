"""
================================================================================
DESCRIPTIVE KEYPHRASES — Positional Features
================================================================================
absolute first occurrence a  = first match start / document token count
relative first occurrence    = (1 - a) ** k, k = number of occurrences
in first sentence            = phrase lies inside sentence 0

Phrases absent from the document get the sentinel (a=1, relative=0, first=0).
================================================================================
"""

from dataclasses import asdict, dataclass
from typing import Dict, Sequence

from corpus_ingest import Document

POSITIONAL_FEATURES = (
    "absolute_first_occurrence",
    "relative_first_occurrence",
    "in_first_sentence",
)


@dataclass(frozen=True)
class PositionalFeatures:
    absolute_first_occurrence: float = 1.0
    relative_first_occurrence: float = 0.0
    in_first_sentence: int = 0
    occurrence_count: int = 0

    def to_dict(self) -> Dict[str, float]:
        data = asdict(self)
        data.pop("occurrence_count")
        return data


ABSENT = PositionalFeatures()


def absolute_first_occurrence(phrase: Sequence[str], document: Document) -> float:
    occurrences = document.find_occurrences(phrase)
    if not occurrences:
        return ABSENT.absolute_first_occurrence
    return occurrences[0] / document.token_count


def relative_first_occurrence(a: float, k: int) -> float:
    if k < 1:
        raise ValueError(f"occurrence count must be >= 1, got {k}")
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"absolute first occurrence must be in [0, 1], got {a}")
    return (1.0 - a) ** k


def in_first_sentence(phrase: Sequence[str], document: Document) -> int:
    if not document.sentences:
        return 0
    start, end = document.sentences[0]
    return int(bool(document.find_occurrences(phrase, start, end)))


def positional_features(phrase: Sequence[str], document: Document) -> PositionalFeatures:
    occurrences = document.find_occurrences(phrase)
    if not occurrences:
        return ABSENT
    a = occurrences[0] / document.token_count
    k = len(occurrences)
    return PositionalFeatures(
        absolute_first_occurrence=a,
        relative_first_occurrence=relative_first_occurrence(a, k),
        in_first_sentence=in_first_sentence(phrase, document),
        occurrence_count=k,
    )
