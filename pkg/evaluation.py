"""
================================================================================
DESCRIPTIVE KEYPHRASES — Precision-Recall Evaluation
================================================================================
Threshold-sweep PR curves (tied scores form one operating point), the
trapezoidal area under them, and side-by-side model comparison.
================================================================================
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from core.config import TrainingConfig
from core.errors import EvaluationError
from core.logger import LogContext, get_logger
from feature_pipeline import FLOAT_FORMAT, ModelSpec
from model import Model, predict_frame, split_documents, train

logger = get_logger(__name__)


@dataclass(frozen=True)
class PRCurve:
    """Operating points in descending-threshold (ascending-recall) order"""
    thresholds: np.ndarray
    recall: np.ndarray
    precision: np.ndarray

    @property
    def points(self) -> List[Tuple[float, float]]:
        return list(zip(self.recall.tolist(), self.precision.tolist()))

    @property
    def auc(self) -> float:
        return auc_pr(self)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "threshold": self.thresholds,
            "recall": self.recall,
            "precision": self.precision,
        })


def pr_curve(scores: Sequence[float], labels: Sequence[int],
             weights: Optional[Sequence[float]] = None) -> PRCurve:
    """One point per distinct score: precision = TP/(TP+FP), recall = TP/P"""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=float)
    weights = np.ones_like(scores) if weights is None else np.asarray(weights, dtype=float)

    if not (scores.shape == labels.shape == weights.shape):
        raise EvaluationError("scores, labels and weights must have the same length")
    if not np.isfinite(scores).all():
        raise EvaluationError("scores must be finite")
    total_positive = float(np.sum(weights * labels))
    if total_positive <= 0:
        raise EvaluationError("no positive examples to evaluate against")

    order = np.argsort(-scores, kind="mergesort")
    sorted_scores = scores[order]
    tp = np.cumsum((weights * labels)[order])
    fp = np.cumsum((weights * (1.0 - labels))[order])

    # last position of each group of equal scores
    group_ends = np.r_[np.flatnonzero(np.diff(sorted_scores)), len(sorted_scores) - 1]
    tp, fp = tp[group_ends], fp[group_ends]
    predicted = tp + fp
    precision = np.divide(tp, predicted, out=np.zeros_like(tp), where=predicted > 0)
    return PRCurve(sorted_scores[group_ends], tp / total_positive, precision)


def auc_pr(curve: PRCurve) -> float:
    """Trapezoidal area over recall, anchored at (0, first precision)"""
    if len(curve.recall) == 0:
        return 0.0
    recall = np.r_[0.0, curve.recall]
    precision = np.r_[curve.precision[0], curve.precision]
    return float(trapezoid(precision, recall))


# ==================== MODEL COMPARISON ====================

@dataclass
class Comparison:
    table: pd.DataFrame
    curves: Dict[str, PRCurve]
    models: Dict[str, Model]


def split_frame(frame: pd.DataFrame, config: TrainingConfig,
                seed: int) -> Tuple[pd.DataFrame, pd.DataFrame]:
    if config.split_mode == "in-sample":
        return frame, frame
    train_ids, eval_ids = split_documents(frame["doc_id"].tolist(), config.eval_fraction, seed)
    train_rows = frame[frame["doc_id"].isin(train_ids)].reset_index(drop=True)
    eval_rows = frame[frame["doc_id"].isin(eval_ids)].reset_index(drop=True)
    logger.info(f"Held-out split: {len(train_ids)} training / {len(eval_ids)} evaluation documents")
    return train_rows, eval_rows


def evaluate_model(model: Model, frame: pd.DataFrame) -> PRCurve:
    return pr_curve(predict_frame(model, frame), frame["label"].to_numpy())


def compare_models(specs: Sequence[ModelSpec], frame: pd.DataFrame,
                   config: TrainingConfig = TrainingConfig(), seed: int = 0,
                   config_hash: str = "") -> Comparison:
    """Train and evaluate every spec on one shared split"""
    names = [spec.name for spec in specs]
    if len(set(names)) != len(names):
        raise EvaluationError("model specification names must be unique")

    train_rows, eval_rows = split_frame(frame, config, seed)
    curves: Dict[str, PRCurve] = {}
    models: Dict[str, Model] = {}
    for spec in specs:
        with LogContext(logger, model=spec.name):
            model = train(train_rows, spec, config, config_hash)
            curve = evaluate_model(model, eval_rows)
            logger.info(f"{spec.name}: AUC {curve.auc:.4f}")
        models[spec.name] = model
        curves[spec.name] = curve

    table = pd.DataFrame({"model": names, "auc": [curves[n].auc for n in names]})
    table = table.sort_values(["auc", "model"], ascending=[False, True], kind="mergesort")
    return Comparison(table.reset_index(drop=True), curves, models)


def write_curve(curve: PRCurve, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    curve.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_table(table: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path
