"""
================================================================================
DESCRIPTIVE KEYPHRASES — Background Index & Commonness
================================================================================
Exact n-gram counts (1..n_max, within sentences) over the background corpus,
persisted as a checksummed JSON file, plus the commonness score

    commonness(term) = ln(tf_bg) / ln(tf_max[len(term)])

and its equal-width one-hot binning.
================================================================================
"""

import json
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from core.errors import CorpusError, IndexFormatError, ProvenanceError
from core.logger import get_logger
from core.utils import canonical_json, stable_hash
from corpus_ingest import Corpus

logger = get_logger(__name__)

INDEX_FORMAT = "keyphrase-ngram-index"
INDEX_VERSION = 1
MIN_BINS = 2
MAX_BINS = 20

Phrase = Tuple[str, ...]


@dataclass
class NgramIndex:
    """Background n-gram frequencies (tf_bg) and document frequencies (D)"""
    n_max: int
    num_documents: int
    total_tokens: int
    counts: Dict[int, Dict[Phrase, int]] = field(default_factory=dict)
    doc_freq: Dict[Phrase, int] = field(default_factory=dict)

    @cached_property
    def _tf_max(self) -> Dict[int, int]:
        return {n: max(table.values()) for n, table in self.counts.items() if table}

    def tf(self, term: Sequence[str]) -> int:
        term = tuple(term)
        return self.counts.get(len(term), {}).get(term, 0)

    def df(self, term: Sequence[str]) -> int:
        return self.doc_freq.get(tuple(term), 0)

    def tf_max(self, order: int) -> int:
        return self._tf_max.get(order, 0)

    def vocabulary_size(self, order: int) -> int:
        return len(self.counts.get(order, {}))

    @property
    def average_document_length(self) -> float:
        """r = T_ref / N"""
        return self.total_tokens / self.num_documents

    def to_payload(self) -> Dict:
        orders = {}
        for n in sorted(self.counts):
            orders[str(n)] = [
                [" ".join(term), tf, self.doc_freq[term]]
                for term, tf in sorted(self.counts[n].items())
            ]
        return {
            "n_max": self.n_max,
            "num_documents": self.num_documents,
            "total_tokens": self.total_tokens,
            "orders": orders,
        }

    @classmethod
    def from_payload(cls, payload: Dict) -> "NgramIndex":
        counts: Dict[int, Dict[Phrase, int]] = {}
        doc_freq: Dict[Phrase, int] = {}
        for order, rows in payload["orders"].items():
            n = int(order)
            table = {}
            for text, tf, df in rows:
                term = tuple(text.split(" "))
                if len(term) != n or tf < 1 or df < 1 or not isinstance(tf, int):
                    raise IndexFormatError(f"Malformed index entry at order {n}: {text!r}")
                table[term] = tf
                doc_freq[term] = df
            counts[n] = table
        return cls(
            n_max=int(payload["n_max"]),
            num_documents=int(payload["num_documents"]),
            total_tokens=int(payload["total_tokens"]),
            counts=counts,
            doc_freq=doc_freq,
        )


# ==================== BUILD ====================

def build_index(corpus: Corpus, n_max: int = 5, workers: int = 4) -> NgramIndex:
    """Count every within-sentence n-gram (1..n_max) of the background corpus"""
    if corpus.num_documents == 0:
        raise CorpusError("Cannot index an empty background corpus", stage="index")
    if corpus.total_tokens == 0:
        raise CorpusError("Background corpus has no tokens", stage="index")

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        per_document = list(pool.map(lambda doc: doc.ngram_counts(n_max), corpus))

    # merge in document order
    totals: Counter = Counter()
    doc_freq: Counter = Counter()
    for doc_counts in per_document:
        totals.update(doc_counts)
        doc_freq.update(doc_counts.keys())

    counts: Dict[int, Dict[Phrase, int]] = {n: {} for n in range(1, n_max + 1)}
    for term, tf in totals.items():
        counts[len(term)][term] = tf

    index = NgramIndex(
        n_max=n_max,
        num_documents=corpus.num_documents,
        total_tokens=corpus.total_tokens,
        counts=counts,
        doc_freq=dict(doc_freq),
    )
    logger.info(f"Indexed {len(totals)} n-grams from {corpus.num_documents} documents",
                extra={"count": len(totals)})
    return index


# ==================== PERSISTENCE ====================

def _checksum(header: Dict, payload: Dict) -> str:
    unsigned = {k: v for k, v in header.items() if k != "checksum"}
    return stable_hash({"header": unsigned, "payload": payload})


def save_index(index: NgramIndex, path: str | Path, config_hash: str = "") -> Path:
    """Write the index as compact, key-sorted JSON with a checksummed header"""
    payload = index.to_payload()
    header = {
        "format": INDEX_FORMAT,
        "version": INDEX_VERSION,
        "config_hash": config_hash,
        "n_max": index.n_max,
        "num_documents": index.num_documents,
        "total_tokens": index.total_tokens,
    }
    header["checksum"] = _checksum(header, payload)

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(canonical_json({"header": header, "payload": payload}))
        f.write('\n')
    return path


def load_index(path: str | Path, expected_config_hash: Optional[str] = None) -> NgramIndex:
    """Read and verify an index file; any damage raises IndexFormatError"""
    path = Path(path)
    try:
        data = json.loads(path.read_bytes().decode('utf-8'))
        header, payload = data["header"], data["payload"]
        if header.get("format") != INDEX_FORMAT:
            raise IndexFormatError(f"{path.name}: not an n-gram index (format={header.get('format')!r})")
        if header.get("version") != INDEX_VERSION:
            raise IndexFormatError(f"{path.name}: unsupported index version {header.get('version')!r}")
        if header.get("checksum") != _checksum(header, payload):
            raise IndexFormatError(f"{path.name}: checksum mismatch, file is corrupted")
        index = NgramIndex.from_payload(payload)
        for key in ("n_max", "num_documents", "total_tokens"):
            if header.get(key) != getattr(index, key):
                raise IndexFormatError(f"{path.name}: header {key} disagrees with payload")
    except IndexFormatError:
        raise
    except FileNotFoundError:
        raise IndexFormatError(f"Index file not found: {path}")
    except (OSError, UnicodeDecodeError, ValueError, KeyError, TypeError, AttributeError) as e:
        raise IndexFormatError(f"{path.name}: unreadable index ({type(e).__name__}: {e})")

    if expected_config_hash is not None and header.get("config_hash") != expected_config_hash:
        raise ProvenanceError(
            f"{path.name} was built with config {header.get('config_hash', '')[:12]}, "
            f"current config is {expected_config_hash[:12]}; rerun index-background"
        )
    return index


# ==================== COMMONNESS ====================

def commonness_value(tf_bg: int, tf_max: int) -> float:
    """ln(tf_bg)/ln(tf_max); 0 for unseen terms, 1 when tf_max is 1"""
    if tf_bg <= 0:
        return 0.0
    if tf_max <= 1:
        return 1.0
    return min(math.log(tf_bg) / math.log(tf_max), 1.0)


def commonness(term: Sequence[str], index: NgramIndex) -> float:
    term = tuple(term)
    return commonness_value(index.tf(term), index.tf_max(len(term)))


def bin_index(value: float, num_bins: int) -> int:
    if not MIN_BINS <= num_bins <= MAX_BINS:
        raise ValueError(f"num_bins must be in {MIN_BINS}..{MAX_BINS}, got {num_bins}")
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"commonness must be in [0, 1], got {value}")
    return min(int(math.floor(value * num_bins)), num_bins - 1)


def bin_commonness(value: float, num_bins: int) -> np.ndarray:
    """Equal-width one-hot encoding over [0, 1]; 1.0 falls in the last bin"""
    one_hot = np.zeros(num_bins, dtype=np.int64)
    one_hot[bin_index(value, num_bins)] = 1
    return one_hot


def bin_labels(num_bins: int) -> list:
    return [f"commonness_bin_{i:02d}" for i in range(num_bins)]
