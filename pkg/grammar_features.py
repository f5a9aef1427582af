"""
================================================================================
DESCRIPTIVE KEYPHRASES — Grammatical Features
================================================================================
Ten binary features from ingested POS tags and NP/VP chunks.

Parse-based:  full/partial NP, full/partial VP, optional leading word, head noun
POS-based:    technical term (T), compound technical term (X) and their
              partial variants, where

    T = (A|N)+ (N|C) | N
    X = (A|N)* N of (T|C) | T

A = {JJ, JJR, JJS}, N = {NN, NNS, NNP, NNPS}, C = {CD}; "of" is a literal
(lowercased) token.
================================================================================
"""

import threading
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

import regex

from core.logger import get_logger
from corpus_ingest import Document

logger = get_logger(__name__)

ADJECTIVE_TAGS = frozenset({"JJ", "JJR", "JJS"})
NOUN_TAGS = frozenset({"NN", "NNS", "NNP", "NNPS"})
NUMBER_TAGS = frozenset({"CD"})
LEADING_WORD_TAGS = frozenset({"CD", "DT", "PDT"})

# One symbol per token: A/N/C by tag class, x otherwise. A token "of" is
# written in lowercase (a/n/c, or y for other tags) so it can fill either
# its class slot or the "of" terminal.
_T = r"(?:[AaNn]+[NnCc]|[Nn])"
TECHNICAL_TERM = regex.compile(_T)
COMPOUND_TECHNICAL_TERM = regex.compile(rf"(?:[AaNn]*[Nn][ancy](?:{_T}|[Cc])|{_T})")

PARSE_FEATURES = (
    "is_full_np", "is_full_vp", "is_partial_np", "is_partial_vp",
    "is_optional_leading_word", "is_head_noun",
)
POS_FEATURES = (
    "is_technical_term", "is_compound_technical_term",
    "is_partial_technical_term", "is_partial_compound_technical_term",
)
GRAMMAR_FEATURES = PARSE_FEATURES + POS_FEATURES

Span = Tuple[int, int]


@dataclass(frozen=True)
class GrammarFeatures:
    is_full_np: int = 0
    is_full_vp: int = 0
    is_partial_np: int = 0
    is_partial_vp: int = 0
    is_optional_leading_word: int = 0
    is_head_noun: int = 0
    is_technical_term: int = 0
    is_compound_technical_term: int = 0
    is_partial_technical_term: int = 0
    is_partial_compound_technical_term: int = 0

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)


class MissingAnnotationCounter:
    """Thread-safe count of feature requests on documents without annotations"""

    def __init__(self):
        self._lock = threading.Lock()
        self._documents: Set[str] = set()
        self.count = 0

    def record(self, doc_id: str) -> None:
        with self._lock:
            self.count += 1
            if doc_id not in self._documents:
                self._documents.add(doc_id)
                logger.warning(f"{doc_id}: no annotations, grammatical features set to 0",
                               extra={"doc_id": doc_id})

    @property
    def documents(self) -> List[str]:
        with self._lock:
            return sorted(self._documents)

    def reset(self) -> None:
        with self._lock:
            self._documents.clear()
            self.count = 0


missing_annotations = MissingAnnotationCounter()


# ==================== PATTERN GRAMMAR ====================

def tag_symbol(tag: str, token: str = "") -> str:
    if tag in ADJECTIVE_TAGS:
        symbol = "A"
    elif tag in NOUN_TAGS:
        symbol = "N"
    elif tag in NUMBER_TAGS:
        symbol = "C"
    else:
        symbol = "X"
    if token.casefold() == "of":
        return "y" if symbol == "X" else symbol.lower()
    return "x" if symbol == "X" else symbol


def encode(pos_tags: Sequence[str], tokens: Optional[Sequence[str]] = None) -> str:
    if tokens is None:
        tokens = [""] * len(pos_tags)
    return "".join(tag_symbol(tag, token) for tag, token in zip(pos_tags, tokens))


def match_technical_term(pos_sequence: Sequence[str]) -> bool:
    if not pos_sequence:
        return False
    return TECHNICAL_TERM.fullmatch(encode(pos_sequence)) is not None


def match_compound_technical_term(token_pos_sequence: Sequence[Tuple[str, str]]) -> bool:
    if not token_pos_sequence:
        return False
    tokens, tags = zip(*token_pos_sequence)
    return COMPOUND_TECHNICAL_TERM.fullmatch(encode(tags, tokens)) is not None


def maximal_matches(symbols: str, pattern, offset: int = 0) -> List[Span]:
    """Spans fully matching pattern that no other matching span contains"""
    matches = [
        (i, j)
        for i in range(len(symbols))
        for j in range(i + 1, len(symbols) + 1)
        if pattern.fullmatch(symbols, i, j)
    ]
    maximal = [
        (i, j) for i, j in matches
        if not any(a <= i and j <= b and (a, b) != (i, j) for a, b in matches)
    ]
    return [(i + offset, j + offset) for i, j in maximal]


def _contained(span: Span, ranges: Sequence[Span]) -> bool:
    i, j = span
    return any(a <= i and j <= b for a, b in ranges)


# ==================== FEATURES ====================

class DocumentGrammar:
    """Chunk lookups and maximal T/X matches of one annotated document"""

    def __init__(self, document: Document):
        layer = document.annotations
        if layer is None:
            raise ValueError(f"{document.id} has no annotation layer")
        self.doc_id = document.id
        self.pos_tags = layer.pos_tags
        self.symbols = encode(layer.pos_tags, [t.surface for t in document.tokens])
        self.np_chunks = tuple(layer.np_chunks)
        self.vp_chunks = tuple(layer.vp_chunks)
        self._np_set = set(self.np_chunks)
        self._vp_set = set(self.vp_chunks)
        self._np_starts = {s for s, _ in self.np_chunks}
        self._np_ends = {e for _, e in self.np_chunks}

        self.technical_terms: List[Span] = []
        self.compound_terms: List[Span] = []
        for start, end in document.sentences:
            sentence = self.symbols[start:end]
            self.technical_terms += maximal_matches(sentence, TECHNICAL_TERM, start)
            self.compound_terms += maximal_matches(sentence, COMPOUND_TECHNICAL_TERM, start)

    def features(self, span: Span) -> GrammarFeatures:
        i, j = span
        symbols = self.symbols[i:j]
        technical = TECHNICAL_TERM.fullmatch(symbols) is not None
        compound = COMPOUND_TECHNICAL_TERM.fullmatch(symbols) is not None
        return GrammarFeatures(
            is_full_np=int(span in self._np_set),
            is_full_vp=int(span in self._vp_set),
            is_partial_np=int(_contained(span, self.np_chunks)),
            is_partial_vp=int(_contained(span, self.vp_chunks)),
            is_optional_leading_word=int(self.pos_tags[i] in LEADING_WORD_TAGS and i in self._np_starts),
            is_head_noun=int(j in self._np_ends),
            is_technical_term=int(technical),
            is_compound_technical_term=int(compound),
            is_partial_technical_term=int(technical or _contained(span, self.technical_terms)),
            is_partial_compound_technical_term=int(compound or _contained(span, self.compound_terms)),
        )


def grammatical_features(phrase_span: Optional[Span], document: Document,
                         grammar: Optional[DocumentGrammar] = None) -> GrammarFeatures:
    """
    Grammatical features of the token span [start, end) in document.

    Documents without annotations give all zeros and are counted in
    `missing_annotations`. A phrase with no span in the document also gets zeros.
    """
    if document.annotations is None:
        missing_annotations.record(document.id)
        return GrammarFeatures()
    if phrase_span is None:
        return GrammarFeatures()
    if grammar is None:
        grammar = DocumentGrammar(document)
    return grammar.features(phrase_span)


def feature_names(parse: bool = True, pos: bool = True) -> Tuple[str, ...]:
    return (PARSE_FEATURES if parse else ()) + (POS_FEATURES if pos else ())
