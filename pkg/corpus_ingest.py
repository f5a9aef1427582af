"""
================================================================================
DESCRIPTIVE KEYPHRASES — Corpus Ingest
================================================================================
Loads foreground/background corpora (one `<id>.txt` per document, first line
is the title), tokenizes, segments sentences and attaches external
grammatical annotations (`<id>.ann`, `token<TAB>POS<TAB>chunk`).

Documents are title + "\n" + body, so title words take positions
0..len(title). Matching always uses the case-folded token stream.
================================================================================
"""

import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import regex

from core.errors import AnnotationError, CorpusError
from core.logger import get_logger
from core.utils import save_json

logger = get_logger(__name__)

# ==================== CONSTANTS ====================
TOKEN_PATTERN = regex.compile(r"[\p{L}\p{N}]+(?:-[\p{L}\p{N}]+)*")
# A terminator ends a sentence only when whitespace follows it (after any
# closing quotes or brackets), so "3.5" and "2.0" stay whole.
TERMINATOR_PATTERN = regex.compile(r"[.!?][\"')\]]*\s")
ABBREVIATIONS = ("e.g.", "i.e.", "et al.", "Fig.", "vs.", "cf.", "Dr.", "No.", "U.S.")
ABBREVIATION_PATTERN = regex.compile(
    r"(?<![^\s(\[])(?:" + "|".join(regex.escape(a) for a in ABBREVIATIONS) + r")"
)

PENN_TAGS = frozenset({
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD",
    "NN", "NNS", "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR",
    "RBS", "RP", "SYM", "TO", "UH", "VB", "VBD", "VBG", "VBN", "VBP", "VBZ",
    "WDT", "WP", "WP$", "WRB",
    "$", "#", "``", "''", "(", ")", ",", ".", ":", "-LRB-", "-RRB-",
})
CHUNK_TAGS = frozenset({"B-NP", "I-NP", "B-VP", "I-VP", "O"})

Span = Tuple[int, int]


# ==================== DATA TYPES ====================

@dataclass(frozen=True)
class Token:
    surface: str
    lowercased: str
    char_span: Span
    index: int


@dataclass(frozen=True)
class AnnotationLayer:
    """POS tags plus NP/VP chunk ranges (half-open token indices)"""
    pos_tags: Tuple[str, ...]
    np_chunks: Tuple[Span, ...] = ()
    vp_chunks: Tuple[Span, ...] = ()

    def validate(self, token_count: int, doc_id: str = "?") -> None:
        if len(self.pos_tags) != token_count:
            raise AnnotationError(
                f"{doc_id}: annotation has {len(self.pos_tags)} tokens, "
                f"document has {token_count}"
            )
        for tag in self.pos_tags:
            if tag not in PENN_TAGS:
                raise AnnotationError(f"{doc_id}: unknown POS tag '{tag}'")
        for kind, chunks in (("NP", self.np_chunks), ("VP", self.vp_chunks)):
            previous_end = 0
            for start, end in sorted(chunks):
                if not 0 <= start < end <= token_count:
                    raise AnnotationError(f"{doc_id}: {kind} chunk [{start},{end}) out of bounds")
                if start < previous_end:
                    raise AnnotationError(f"{doc_id}: overlapping {kind} chunks at {start}")
                previous_end = end

    def to_dict(self) -> Dict:
        return {
            "pos_tags": list(self.pos_tags),
            "np_chunks": [list(c) for c in self.np_chunks],
            "vp_chunks": [list(c) for c in self.vp_chunks],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "AnnotationLayer":
        return cls(
            pos_tags=tuple(data["pos_tags"]),
            np_chunks=tuple(tuple(c) for c in data.get("np_chunks", [])),
            vp_chunks=tuple(tuple(c) for c in data.get("vp_chunks", [])),
        )


@dataclass(frozen=True)
class Document:
    """Tokenized, sentence-segmented title + body"""
    id: str
    title: str
    body: str
    tokens: Tuple[Token, ...]
    sentences: Tuple[Span, ...]
    title_token_count: int = 0
    annotations: Optional[AnnotationLayer] = field(default=None, compare=False)

    @property
    def text(self) -> str:
        return compose_text(self.title, self.body)

    @property
    def token_count(self) -> int:
        return len(self.tokens)

    @cached_property
    def lowered(self) -> Tuple[str, ...]:
        return tuple(t.lowercased for t in self.tokens)

    @property
    def title_tokens(self) -> Tuple[str, ...]:
        return self.lowered[:self.title_token_count]

    @property
    def body_tokens(self) -> Tuple[str, ...]:
        return self.lowered[self.title_token_count:]

    def sentence_tokens(self, i: int) -> Tuple[str, ...]:
        start, end = self.sentences[i]
        return self.lowered[start:end]

    def find_occurrences(self, phrase: Sequence[str], start: int = 0,
                         end: Optional[int] = None) -> List[int]:
        """Start indices of contiguous matches of phrase within [start, end)"""
        phrase = tuple(phrase)
        n = len(phrase)
        if n == 0:
            return []
        stop = self.token_count if end is None else end
        lowered = self.lowered
        return [
            i for i in range(start, stop - n + 1)
            if lowered[i] == phrase[0] and lowered[i:i + n] == phrase
        ]

    def contains(self, phrase: Sequence[str]) -> bool:
        return bool(self.find_occurrences(phrase))

    def iter_sentence_ngrams(self, n_max: int = 5) -> Iterator[Tuple[Tuple[str, ...], int]]:
        """Yield (ngram, start) for every n-gram that stays inside one sentence"""
        lowered = self.lowered
        for start, end in self.sentences:
            for i in range(start, end):
                for n in range(1, n_max + 1):
                    if i + n > end:
                        break
                    yield lowered[i:i + n], i

    def ngram_counts(self, n_max: int = 5) -> Counter:
        return Counter(gram for gram, _ in self.iter_sentence_ngrams(n_max))

    def with_annotations(self, layer: Optional[AnnotationLayer]) -> "Document":
        if layer is not None:
            layer.validate(self.token_count, self.id)
        return replace(self, annotations=layer)

    def to_dict(self) -> Dict:
        return {
            "id": self.id,
            "title": self.title,
            "body": self.body,
            "tokens": [[t.surface, t.char_span[0], t.char_span[1]] for t in self.tokens],
            "sentences": [list(s) for s in self.sentences],
            "title_token_count": self.title_token_count,
            "annotations": self.annotations.to_dict() if self.annotations else None,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "Document":
        tokens = tuple(
            Token(surface, surface.casefold(), (start, end), i)
            for i, (surface, start, end) in enumerate(data["tokens"])
        )
        annotations = data.get("annotations")
        return cls(
            id=data["id"],
            title=data["title"],
            body=data["body"],
            tokens=tokens,
            sentences=tuple(tuple(s) for s in data["sentences"]),
            title_token_count=data.get("title_token_count", 0),
            annotations=AnnotationLayer.from_dict(annotations) if annotations else None,
        )


@dataclass(frozen=True)
class Corpus:
    """Immutable collection of documents in file order"""
    role: str
    documents: Tuple[Document, ...]

    @cached_property
    def _by_id(self) -> Dict[str, Document]:
        return {d.id: d for d in self.documents}

    @property
    def num_documents(self) -> int:
        return len(self.documents)

    @property
    def total_tokens(self) -> int:
        return sum(d.token_count for d in self.documents)

    @property
    def total_sentences(self) -> int:
        return sum(len(d.sentences) for d in self.documents)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._by_id

    def get(self, doc_id: str) -> Optional[Document]:
        return self._by_id.get(doc_id)

    def __getitem__(self, doc_id: str) -> Document:
        try:
            return self._by_id[doc_id]
        except KeyError:
            raise CorpusError(f"Unknown document id '{doc_id}' in {self.role} corpus")

    def with_annotations(self, directory: str | Path) -> "Corpus":
        """Attach `<id>.ann` layers; documents without a file keep None"""
        directory = Path(directory)
        documents = []
        missing = []
        for doc in self.documents:
            ann_file = directory / f"{doc.id}.ann"
            if ann_file.exists():
                documents.append(doc.with_annotations(ingest_annotations(doc, ann_file)))
            else:
                missing.append(doc.id)
                documents.append(doc)
        if missing:
            logger.warning(f"{len(missing)} document(s) without annotations: {', '.join(missing)}",
                           extra={"count": len(missing)})
        return Corpus(self.role, tuple(documents))

    def to_dict(self) -> Dict:
        return {"role": self.role, "documents": [d.to_dict() for d in self.documents]}

    @classmethod
    def from_dict(cls, data: Dict) -> "Corpus":
        return cls(data["role"], tuple(Document.from_dict(d) for d in data["documents"]))

    def save(self, path: str | Path) -> Path:
        return save_json(self.to_dict(), path)

    @classmethod
    def load(cls, path: str | Path) -> "Corpus":
        try:
            with open(path, 'r', encoding='utf-8') as f:
                return cls.from_dict(json.load(f))
        except (OSError, ValueError, KeyError, TypeError) as e:
            raise CorpusError(f"Cannot load corpus from {path}: {e}")

    def to_manifest(self) -> Dict:
        """Per-document token/sentence (and chunk) counts"""
        documents = {}
        for doc in self.documents:
            entry = {"tokens": doc.token_count, "sentences": len(doc.sentences)}
            if doc.annotations is not None:
                entry["np_chunks"] = len(doc.annotations.np_chunks)
                entry["vp_chunks"] = len(doc.annotations.vp_chunks)
            documents[doc.id] = entry
        return {
            "role": self.role,
            "num_documents": self.num_documents,
            "total_tokens": self.total_tokens,
            "total_sentences": self.total_sentences,
            "documents": documents,
        }


# ==================== TOKENIZATION ====================

def tokenize(text: str) -> List[Token]:
    """Maximal letter/digit runs; hyphen-internal words stay one token"""
    return [
        Token(m.group(), m.group().casefold(), m.span(), i)
        for i, m in enumerate(TOKEN_PATTERN.finditer(text))
    ]


def _abbreviation_periods(text: str) -> set:
    covered = set()
    for m in ABBREVIATION_PATTERN.finditer(text):
        covered.update(range(m.start(), m.end()))
    return covered


def segment_sentences(tokens: Sequence[Token], text: str) -> List[Span]:
    """
    Split a token sequence into sentence ranges.

    A boundary follows token i when the text between it and the next token
    holds a terminator (. ! ?) followed by whitespace that is not part of a
    known abbreviation, and the next token starts with an uppercase letter
    or a digit.
    """
    if not tokens:
        return []

    covered = _abbreviation_periods(text)
    ranges = []
    start = 0
    for i in range(len(tokens) - 1):
        gap_start = tokens[i].char_span[1]
        gap_end = tokens[i + 1].char_span[0]
        terminated = any(
            gap_start + m.start() not in covered
            for m in TERMINATOR_PATTERN.finditer(text[gap_start:gap_end])
        )
        first = tokens[i + 1].surface[0]
        if terminated and (first.isupper() or first.isdigit()):
            ranges.append((start, i + 1))
            start = i + 1
    ranges.append((start, len(tokens)))
    return ranges


def compose_text(title: str, body: str) -> str:
    return f"{title}\n{body}"


def make_document(doc_id: str, title: str, body: str) -> Document:
    """Build a Document from its title and body"""
    text = compose_text(title, body)
    tokens = tokenize(text)
    title_token_count = sum(1 for t in tokens if t.char_span[1] <= len(title))
    return Document(
        id=doc_id,
        title=title,
        body=body,
        tokens=tuple(tokens),
        sentences=tuple(segment_sentences(tokens, text)),
        title_token_count=title_token_count,
    )


def read_document(path: Path) -> Document:
    try:
        content = path.read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as e:
        raise CorpusError(f"Cannot read document {path.name}: {e}")
    title, _, body = content.partition("\n")
    return make_document(path.stem, title.strip(), body.strip())


def load_corpus(directory: str | Path, role: str, workers: int = 4) -> Corpus:
    """Load every `*.txt` file of directory (sorted by name) as a Document"""
    directory = Path(directory)
    if not directory.is_dir():
        raise CorpusError(f"{role} corpus directory not found: {directory}")

    files = sorted(directory.glob("*.txt"))
    if not files:
        raise CorpusError(f"{role} corpus directory is empty: {directory}")

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        documents = tuple(pool.map(read_document, files))

    corpus = Corpus(role, documents)
    logger.info(f"Loaded {role} corpus: {corpus.num_documents} documents, "
                f"{corpus.total_tokens} tokens", extra={"count": corpus.num_documents})
    return corpus


# ==================== ANNOTATIONS ====================

def _close(chunks: Dict[str, List[Span]], open_chunk: Optional[Tuple[str, int]], end: int) -> None:
    if open_chunk is not None:
        kind, start = open_chunk
        chunks[kind].append((start, end))


def ingest_annotations(document: Document, annotation_file: str | Path) -> AnnotationLayer:
    """
    Parse and validate a `token<TAB>POS<TAB>chunk` file for document.

    Blank lines are sentence breaks and carry no information. An I- tag that
    does not continue a chunk of the same kind opens a new chunk.
    """
    annotation_file = Path(annotation_file)
    try:
        lines = annotation_file.read_text(encoding='utf-8').splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise AnnotationError(f"{document.id}: cannot read {annotation_file.name}: {e}")

    rows = []
    for line_no, line in enumerate(lines, 1):
        if not line.strip():
            continue
        parts = line.rstrip("\r").split("\t")
        if len(parts) != 3:
            raise AnnotationError(
                f"{document.id}: {annotation_file.name}:{line_no} needs token, POS and chunk columns"
            )
        rows.append(parts)

    if len(rows) != document.token_count:
        raise AnnotationError(
            f"{document.id}: annotation has {len(rows)} tokens, "
            f"document has {document.token_count}"
        )

    pos_tags = []
    chunks: Dict[str, List[Span]] = {"NP": [], "VP": []}
    open_chunk: Optional[Tuple[str, int]] = None

    for i, (token, pos, chunk) in enumerate(rows):
        if pos not in PENN_TAGS:
            raise AnnotationError(f"{document.id}: unknown POS tag '{pos}' at token {i}")
        if chunk not in CHUNK_TAGS:
            raise AnnotationError(f"{document.id}: unknown chunk tag '{chunk}' at token {i}")
        if token != document.tokens[i].surface:
            logger.debug(f"{document.id}: token {i} is '{token}' in annotations, "
                         f"'{document.tokens[i].surface}' in text")
        pos_tags.append(pos)

        if chunk == "O":
            _close(chunks, open_chunk, i)
            open_chunk = None
            continue
        prefix, kind = chunk.split("-")
        if prefix == "B" or open_chunk is None or open_chunk[0] != kind:
            _close(chunks, open_chunk, i)
            open_chunk = (kind, i)
    _close(chunks, open_chunk, len(rows))

    layer = AnnotationLayer(tuple(pos_tags), tuple(chunks["NP"]), tuple(chunks["VP"]))
    layer.validate(document.token_count, document.id)
    return layer
