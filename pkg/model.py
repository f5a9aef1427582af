"""
================================================================================
DESCRIPTIVE KEYPHRASES — Weighted Logistic Regression
================================================================================
Unregularized, sample-weighted logistic regression fitted by Newton steps
(IRLS) with step halving on internally standardized features. Coefficients
are reported on the original feature scale.

Convergence: the gradient of the weight-normalized log-likelihood has
infinity-norm <= tolerance. A coefficient norm above the separation cap
stops the fit with a warning and returns the capped coefficients.
================================================================================
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.special import expit

from core.config import TrainingConfig
from core.errors import ModelError
from core.logger import get_logger
from core.utils import save_json
from feature_pipeline import ModelSpec

logger = get_logger(__name__)

MODEL_FORMAT_VERSION = 1
STANDARDIZE_EPS = 1e-12
MIN_STEP = 1e-10
SIGNIFICANT_DIGITS = 12


def _round(value: float) -> float:
    return float(f"{value:.{SIGNIFICANT_DIGITS}g}")


@dataclass
class Model:
    name: str
    feature_names: Tuple[str, ...]
    coefficients: Tuple[float, ...]
    intercept: float
    base_features: Tuple[str, ...] = ()
    commonness_bins: int = 0
    training: Dict = field(default_factory=dict)
    config_hash: str = ""

    def __post_init__(self):
        if len(self.coefficients) != len(self.feature_names):
            raise ModelError(
                f"model '{self.name}' has {len(self.coefficients)} coefficients "
                f"for {len(self.feature_names)} features"
            )

    @property
    def spec(self) -> ModelSpec:
        return ModelSpec(self.name, self.base_features or self.feature_names, self.commonness_bins)

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        return self.intercept + np.asarray(X, dtype=float) @ np.asarray(self.coefficients, dtype=float)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return expit(self.decision_function(X))

    def to_dict(self) -> Dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "name": self.name,
            "feature_names": list(self.feature_names),
            "coefficients": {n: _round(c) for n, c in zip(self.feature_names, self.coefficients)},
            "intercept": _round(self.intercept),
            "base_features": list(self.base_features),
            "commonness_bins": self.commonness_bins,
            "training": self.training,
            "config_hash": self.config_hash,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "Model":
        if data.get("format_version") != MODEL_FORMAT_VERSION:
            raise ModelError(f"unsupported model format version {data.get('format_version')!r}")
        names = tuple(data["feature_names"])
        return cls(
            name=data["name"],
            feature_names=names,
            coefficients=tuple(float(data["coefficients"][n]) for n in names),
            intercept=float(data["intercept"]),
            base_features=tuple(data.get("base_features", ())),
            commonness_bins=int(data.get("commonness_bins", 0)),
            training=data.get("training", {}),
            config_hash=data.get("config_hash", ""),
        )

    def save(self, path: str | Path) -> Path:
        return save_json(self.to_dict(), path)

    @classmethod
    def load(cls, path: str | Path) -> "Model":
        try:
            with open(path, 'r', encoding='utf-8') as f:
                return cls.from_dict(json.load(f))
        except (OSError, ValueError, KeyError, TypeError) as e:
            raise ModelError(f"Cannot load model {path}: {e}")


# ==================== LIKELIHOOD ====================

def _with_intercept(X: np.ndarray) -> np.ndarray:
    return np.hstack([np.ones((X.shape[0], 1)), X])


def weighted_log_likelihood(params: np.ndarray, X: np.ndarray, y: np.ndarray, w: np.ndarray) -> float:
    """sum_i w_i [y_i ln p_i + (1 - y_i) ln(1 - p_i)], params = [intercept, coefs...]"""
    eta = _with_intercept(X) @ params
    return float(np.sum(w * (y * eta - np.logaddexp(0.0, eta))))


def log_likelihood_gradient(params: np.ndarray, X: np.ndarray, y: np.ndarray, w: np.ndarray) -> np.ndarray:
    A = _with_intercept(X)
    return A.T @ (w * (y - expit(A @ params)))


# ==================== TRAINING ====================

def _validate(X: np.ndarray, y: np.ndarray, w: np.ndarray, labels: Optional[Sequence[str]]) -> None:
    if X.ndim != 2 or X.shape[0] != y.shape[0] or y.shape != w.shape:
        raise ModelError(f"shape mismatch: X {X.shape}, y {y.shape}, w {w.shape}")
    bad_rows = np.flatnonzero(~np.isfinite(X).all(axis=1))
    if bad_rows.size:
        row = int(bad_rows[0])
        name = labels[row] if labels is not None else f"row {row}"
        raise ModelError(f"non-finite feature value in example {name}")
    if np.any(w < 0) or not np.isfinite(w).all():
        raise ModelError("sample weights must be finite and non-negative")
    if not np.isin(y, (0, 1)).all():
        raise ModelError("labels must be 0 or 1")
    if not (np.sum(w * y) > 0 and np.sum(w * (1 - y)) > 0):
        raise ModelError("training needs at least one positive and one negative example")


def fit_logistic(X: np.ndarray, y: np.ndarray, w: np.ndarray,
                 config: TrainingConfig = TrainingConfig(),
                 labels: Optional[Sequence[str]] = None) -> Tuple[np.ndarray, float, Dict]:
    """
    Maximize the weighted log-likelihood.

    Returns (coefficients, intercept, training info) on the original scale.
    Constant columns get coefficient 0.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    _validate(X, y, w, labels)

    mean = X.mean(axis=0) if X.shape[1] else np.zeros(0)
    std = X.std(axis=0) if X.shape[1] else np.zeros(0)
    keep = np.flatnonzero(std > STANDARDIZE_EPS)
    Z = (X[:, keep] - mean[keep]) / std[keep]
    A = _with_intercept(Z)

    total_weight = w.sum()
    positive_fraction = np.sum(w * y) / total_weight
    beta = np.zeros(A.shape[1])
    beta[0] = math.log(positive_fraction / (1.0 - positive_fraction))

    def objective(b: np.ndarray) -> float:
        eta = A @ b
        return float(np.sum(w * (y * eta - np.logaddexp(0.0, eta))))

    current = objective(beta)
    converged = capped = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        p = expit(A @ beta)
        gradient = A.T @ (w * (y - p))
        if np.max(np.abs(gradient)) / total_weight <= config.tolerance:
            converged = True
            iterations -= 1
            break

        hessian = A.T @ (A * (w * p * (1.0 - p))[:, None])
        step = np.linalg.lstsq(hessian, gradient, rcond=None)[0]

        t = 1.0
        candidate = beta + step
        value = objective(candidate)
        while value < current and t > MIN_STEP:
            t /= 2.0
            candidate = beta + t * step
            value = objective(candidate)
        if value < current:
            logger.warning("line search failed to improve the likelihood; stopping")
            break
        beta, current = candidate, value

        norm = float(np.linalg.norm(beta[1:]))
        if norm > config.separation_cap:
            beta[1:] *= config.separation_cap / norm
            current = objective(beta)
            capped = True
            logger.warning(
                f"coefficient norm {norm:.3g} exceeds separation cap {config.separation_cap:g}; "
                f"data look separable, returning capped coefficients"
            )
            break
    else:
        p = expit(A @ beta)
        gradient = A.T @ (w * (y - p))
        converged = np.max(np.abs(gradient)) / total_weight <= config.tolerance
        if not converged:
            logger.warning(f"no convergence after {config.max_iterations} iterations")

    coefficients = np.zeros(X.shape[1])
    coefficients[keep] = beta[1:] / std[keep]
    intercept = float(beta[0] - np.sum(beta[1:] * mean[keep] / std[keep]))

    info = {
        "iterations": iterations,
        "converged": bool(converged),
        "separation_capped": capped,
        "dropped_constant_columns": int(X.shape[1] - keep.size),
        "log_likelihood": _round(current),
        "num_examples": int(X.shape[0]),
        "total_weight": _round(float(total_weight)),
    }
    return coefficients, intercept, info


def train(frame: pd.DataFrame, spec: ModelSpec, config: TrainingConfig = TrainingConfig(),
          config_hash: str = "") -> Model:
    """Fit spec's feature subset on a featurized table (label, weight columns)"""
    X, names = spec.design_matrix(frame)
    labels = [f"{d}:{p}" for d, p in zip(frame["doc_id"], frame["phrase"])]
    coefficients, intercept, info = fit_logistic(
        X, frame["label"].to_numpy(dtype=float), frame["weight"].to_numpy(dtype=float), config, labels
    )
    model = Model(
        name=spec.name,
        feature_names=tuple(names),
        coefficients=tuple(float(c) for c in coefficients),
        intercept=intercept,
        base_features=tuple(spec.features),
        commonness_bins=spec.commonness_bins,
        training=info,
        config_hash=config_hash,
    )
    logger.info(f"Trained '{spec.name}' on {len(frame)} examples in {info['iterations']} iteration(s)")
    return model


# ==================== PREDICTION ====================

def predict(model: Model, feature_vector: Mapping[str, float]) -> float:
    """sigmoid(intercept + sum coef * feature); names must match the model exactly"""
    if set(feature_vector) != set(model.feature_names):
        missing = sorted(set(model.feature_names) - set(feature_vector))
        extra = sorted(set(feature_vector) - set(model.feature_names))
        raise ModelError(
            f"feature names do not match model '{model.name}' "
            f"(missing: {', '.join(missing) or '-'}; unexpected: {', '.join(extra) or '-'})"
        )
    x = np.array([[feature_vector[n] for n in model.feature_names]], dtype=float)
    return float(model.predict_proba(x)[0])


def predict_frame(model: Model, frame: pd.DataFrame) -> np.ndarray:
    X, names = model.spec.design_matrix(frame)
    if tuple(names) != model.feature_names:
        raise ModelError(f"feature matrix columns do not match model '{model.name}'")
    return model.predict_proba(X)


def rank_scores(phrases: Sequence[str], scores: Sequence[float]) -> List[Tuple[str, float]]:
    """Descending score; ties broken by lexicographic phrase order"""
    return sorted(zip(phrases, (float(s) for s in scores)), key=lambda item: (-item[1], item[0]))


def rank(model: Model, document, candidates: pd.DataFrame) -> List[Tuple[str, float]]:
    """Rank one document's featurized candidates (document or its id)"""
    doc_id = getattr(document, "id", document)
    rows = candidates[candidates["doc_id"] == doc_id]
    if rows.empty:
        return []
    return rank_scores(list(rows["phrase"]), predict_frame(model, rows))


def top_k_rankings(model: Model, candidates: pd.DataFrame, k: int = 10) -> pd.DataFrame:
    """doc_id, rank, phrase, score for the k best distinct candidates per document"""
    records = []
    unique = candidates.drop_duplicates(subset=["doc_id", "phrase"])
    for doc_id in sorted(unique["doc_id"].unique()):
        for position, (phrase, score) in enumerate(rank(model, doc_id, unique)[:k], 1):
            records.append({"doc_id": doc_id, "rank": position, "phrase": phrase, "score": score})
    return pd.DataFrame(records, columns=["doc_id", "rank", "phrase", "score"])


# ==================== SPLITS ====================

def split_documents(doc_ids: Sequence[str], eval_fraction: float = 0.25,
                    seed: int = 0) -> Tuple[List[str], List[str]]:
    """Seeded document-level train/eval split"""
    unique = sorted(set(doc_ids))
    if len(unique) < 2:
        raise ModelError("a held-out split needs at least two documents")
    order = np.random.default_rng(seed).permutation(len(unique))
    n_eval = min(max(1, int(round(eval_fraction * len(unique)))), len(unique) - 1)
    eval_ids = sorted(unique[i] for i in order[:n_eval])
    train_ids = sorted(unique[i] for i in order[n_eval:])
    return train_ids, eval_ids
