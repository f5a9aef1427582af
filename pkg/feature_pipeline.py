"""
================================================================================
DESCRIPTIVE KEYPHRASES — Feature Pipeline
================================================================================
Featurizes labeled examples into one table (one row per example, one column
per enabled feature) and turns that table into design matrices for the model
specifications compared by `run.py eval`.

Commonness is stored raw; binned one-hot columns are expanded from it when a
specification asks for bins.
================================================================================
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from candidates import LabeledExample
from commonness import NgramIndex, bin_index, bin_labels, commonness
from core.config import FeatureConfig
from core.errors import FeatureError
from core.logger import get_logger
from corpus_ingest import Corpus, Document
from freq_features import (
    FREQUENCY_FEATURES,
    DocumentTermCounts,
    FrequencyFeatureConfig,
    frequency_features,
    term_statistics,
)
from grammar_features import (
    PARSE_FEATURES,
    POS_FEATURES,
    DocumentGrammar,
    grammatical_features,
)
from positional_features import POSITIONAL_FEATURES, positional_features

logger = get_logger(__name__)

META_COLUMNS = ("doc_id", "phrase", "label", "weight")
COMMONNESS = "commonness"
FLOAT_FORMAT = "%.10g"


def enabled_columns(config: FeatureConfig) -> List[str]:
    columns: List[str] = []
    if config.frequency:
        columns += FREQUENCY_FEATURES
    if config.commonness:
        columns.append(COMMONNESS)
    if config.grammar_parse:
        columns += PARSE_FEATURES
    if config.grammar_pos:
        columns += POS_FEATURES
    if config.positional:
        columns += POSITIONAL_FEATURES
    return columns


# ==================== FEATURIZATION ====================

def _document_rows(document: Document, examples: Sequence[LabeledExample],
                   index: Optional[NgramIndex], config: FeatureConfig) -> List[Dict]:
    freq_config = FrequencyFeatureConfig(config.bm25_k1, config.bm25_b, config.smoothing_increment)
    needs_index = config.frequency or config.commonness
    doc_counts = DocumentTermCounts.from_document(document, index.n_max) if needs_index else None
    grammar = None
    if (config.grammar_parse or config.grammar_pos) and document.annotations is not None:
        grammar = DocumentGrammar(document)

    rows = []
    for example in examples:
        tokens = example.phrase_tokens
        row = {
            "doc_id": example.doc_id,
            "phrase": example.phrase,
            "label": example.label.y,
            "weight": example.weight,
        }
        if config.frequency:
            row.update(frequency_features(term_statistics(tokens, doc_counts, index), freq_config))
        if config.commonness:
            row[COMMONNESS] = commonness(tokens, index)
        if config.grammar_parse or config.grammar_pos:
            occurrences = document.find_occurrences(tokens)
            span = (occurrences[0], occurrences[0] + len(tokens)) if occurrences else None
            grammar_row = grammatical_features(span, document, grammar).to_dict()
            if config.grammar_parse:
                row.update({name: grammar_row[name] for name in PARSE_FEATURES})
            if config.grammar_pos:
                row.update({name: grammar_row[name] for name in POS_FEATURES})
        if config.positional:
            row.update(positional_features(tokens, document).to_dict())
        rows.append(row)
    return rows


def featurize(examples: Sequence[LabeledExample], corpus: Corpus, index: Optional[NgramIndex],
              config: FeatureConfig, workers: int = 4) -> pd.DataFrame:
    """One row per example (input order kept), columns per enabled family"""
    if (config.frequency or config.commonness) and index is None:
        raise FeatureError("frequency and commonness features need a background index")

    by_doc: Dict[str, List[Tuple[int, LabeledExample]]] = {}
    for position, example in enumerate(examples):
        if example.doc_id not in corpus:
            raise FeatureError(f"example '{example.phrase}' refers to unknown document {example.doc_id}")
        by_doc.setdefault(example.doc_id, []).append((position, example))

    doc_ids = sorted(by_doc)

    def work(doc_id: str) -> List[Tuple[int, Dict]]:
        items = by_doc[doc_id]
        rows = _document_rows(corpus[doc_id], [e for _, e in items], index, config)
        return [(position, row) for (position, _), row in zip(items, rows)]

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(work, doc_ids))

    ordered = sorted((item for chunk in results for item in chunk), key=lambda item: item[0])
    frame = pd.DataFrame([row for _, row in ordered],
                         columns=list(META_COLUMNS) + enabled_columns(config))

    values = frame[enabled_columns(config)].to_numpy(dtype=float)
    if values.size and not np.isfinite(values).all():
        bad = frame.loc[~np.isfinite(values).all(axis=1), ["doc_id", "phrase"]].iloc[0]
        raise FeatureError(f"non-finite feature for '{bad.phrase}' in {bad.doc_id}")

    logger.info(f"Featurized {len(frame)} examples over {len(doc_ids)} documents",
                extra={"count": len(frame)})
    return frame


def save_matrix(frame: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def load_matrix(path: str | Path) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype={"doc_id": str, "phrase": str}, keep_default_na=False)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise FeatureError(f"Cannot read feature matrix {path}: {e}")
    missing = [c for c in META_COLUMNS if c not in frame.columns]
    if missing:
        raise FeatureError(f"Feature matrix {path} lacks column(s): {', '.join(missing)}")
    return frame


# ==================== MODEL SPECIFICATIONS ====================

@dataclass(frozen=True)
class ModelSpec:
    """A named feature subset; commonness_bins > 0 one-hot encodes commonness"""
    name: str
    features: Tuple[str, ...]
    commonness_bins: int = 0

    def columns(self) -> List[str]:
        columns = []
        for name in self.features:
            if name == COMMONNESS and self.commonness_bins:
                columns += bin_labels(self.commonness_bins)
            else:
                columns.append(name)
        return columns

    def design_matrix(self, frame: pd.DataFrame) -> Tuple[np.ndarray, List[str]]:
        """Feature matrix for this spec (bins expanded) and its column names"""
        missing = [name for name in self.features if name not in frame.columns]
        if missing:
            raise FeatureError(
                f"model '{self.name}' needs column(s) {', '.join(missing)} "
                f"that the feature matrix does not have"
            )
        blocks = []
        for name in self.features:
            values = frame[name].to_numpy(dtype=float)
            if name == COMMONNESS and self.commonness_bins:
                one_hot = np.zeros((len(values), self.commonness_bins))
                for row, value in enumerate(values):
                    one_hot[row, bin_index(value, self.commonness_bins)] = 1.0
                blocks.append(one_hot)
            else:
                blocks.append(values[:, None])
        X = np.hstack(blocks) if blocks else np.zeros((len(frame), 0))
        return X, self.columns()


FREQUENCY_SPEC = ModelSpec("frequency", FREQUENCY_FEATURES)
COMMONNESS_SPEC = ModelSpec("log_tf+commonness", ("log_tf", COMMONNESS))
GRAMMAR_SPEC = ModelSpec("log_tf+commonness+grammar", ("log_tf", COMMONNESS) + PARSE_FEATURES + POS_FEATURES)
ALL_SPEC = ModelSpec(
    "all", FREQUENCY_FEATURES + (COMMONNESS,) + PARSE_FEATURES + POS_FEATURES + POSITIONAL_FEATURES
)
CORPUS_INDEPENDENT_SPEC = ModelSpec("corpus_independent", ("log_tf",) + POSITIONAL_FEATURES + POS_FEATURES)

STANDARD_SPECS = (FREQUENCY_SPEC, COMMONNESS_SPEC, GRAMMAR_SPEC, ALL_SPEC, CORPUS_INDEPENDENT_SPEC)


def bin_sweep_specs(low: int = 2, high: int = 20) -> List[ModelSpec]:
    return [
        ModelSpec(f"log_tf+commonness_bins_{bins:02d}", ("log_tf", COMMONNESS), bins)
        for bins in range(low, high + 1)
    ]


def extended_specs() -> List[ModelSpec]:
    """Single-feature frequency models and the POS-only grammar variant"""
    singles = [ModelSpec(name, (name,)) for name in FREQUENCY_FEATURES]
    return singles + [ModelSpec("log_tf+commonness+pos_grammar", ("log_tf", COMMONNESS) + POS_FEATURES)]


def experiment_specs(extended: bool = False) -> List[ModelSpec]:
    specs = list(STANDARD_SPECS) + bin_sweep_specs()
    if extended:
        specs += extended_specs()
    return specs


def default_spec(config: FeatureConfig) -> ModelSpec:
    """Every enabled family, with the configured commonness binning"""
    return ModelSpec("configured", tuple(enabled_columns(config)), config.commonness_bins)
