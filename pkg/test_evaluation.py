"""
================================================================================
DESCRIPTIVE KEYPHRASES — Precision-Recall Evaluation Tests
================================================================================
"""

import numpy as np
import pandas as pd
import pytest

from core.config import TrainingConfig
from core.errors import EvaluationError
from evaluation import auc_pr, compare_models, pr_curve, split_frame, write_curve
from feature_pipeline import ModelSpec


def _sweep(scores, labels):
    """Quadratic reference: one operating point per distinct threshold"""
    points = []
    positives = sum(labels)
    for threshold in sorted(set(scores), reverse=True):
        predicted = [l for s, l in zip(scores, labels) if s >= threshold]
        tp = sum(predicted)
        points.append((threshold, tp / positives, tp / len(predicted)))
    return points


class TestCurve:
    def test_matches_quadratic_sweep_with_ties(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            scores = np.round(rng.random(60), 1)
            labels = (rng.random(60) < 0.3).astype(int)
            if labels.sum() == 0:
                continue
            curve = pr_curve(scores, labels)
            expected = _sweep(scores.tolist(), labels.tolist())
            np.testing.assert_allclose(curve.thresholds, [p[0] for p in expected])
            np.testing.assert_allclose(curve.recall, [p[1] for p in expected])
            np.testing.assert_allclose(curve.precision, [p[2] for p in expected])

    def test_perfect_ranking(self):
        curve = pr_curve([0.9, 0.8, 0.3, 0.2, 0.1], [1, 1, 0, 0, 0])
        assert curve.auc == pytest.approx(1.0)
        assert curve.recall[-1] == 1.0

    def test_all_tied_scores(self):
        curve = pr_curve([0.5] * 10, [1, 1, 0, 0, 0, 0, 0, 0, 0, 0])
        assert len(curve.thresholds) == 1
        assert curve.points == [(1.0, 0.2)]
        assert curve.auc == pytest.approx(0.2)

    def test_random_scores_approach_positive_rate(self):
        rng = np.random.default_rng(11)
        labels = (rng.random(20000) < 0.2).astype(int)
        curve = pr_curve(rng.random(20000), labels)
        assert curve.auc == pytest.approx(labels.mean(), abs=0.02)

    def test_hand_computed_area(self):
        # anchor (0, 1), then recall 0.5 at p=1, 0.5 at p=1/2, 1.0 at p=2/3
        curve = pr_curve([0.9, 0.7, 0.4], [1, 0, 1])
        assert curve.points == [(0.5, 1.0), (0.5, 0.5), (1.0, pytest.approx(2 / 3))]
        expected = 0.5 * 1.0 + 0.5 * (0.5 + 2 / 3) / 2
        assert auc_pr(curve) == pytest.approx(expected)

    def test_weights_scale_counts(self):
        weighted = pr_curve([0.9, 0.7, 0.4], [1, 0, 1], weights=[1.0, 2.0, 1.0])
        assert weighted.precision[1] == pytest.approx(1 / 3)

    def test_monotone_transform_keeps_points(self):
        rng = np.random.default_rng(8)
        scores = np.round(rng.random(200), 1)
        labels = (rng.random(200) < 0.3).astype(int)
        base = pr_curve(scores, labels)
        for transformed in (3 * scores + 1, np.exp(scores), scores ** 3):
            curve = pr_curve(transformed, labels)
            np.testing.assert_array_equal(curve.recall, base.recall)
            np.testing.assert_array_equal(curve.precision, base.precision)
            assert curve.auc == base.auc

    def test_order_of_tied_examples_is_irrelevant(self):
        rng = np.random.default_rng(9)
        scores = np.round(rng.random(150), 1)
        labels = (rng.random(150) < 0.3).astype(int)
        base = pr_curve(scores, labels)
        for _ in range(10):
            order = rng.permutation(len(scores))
            curve = pr_curve(scores[order], labels[order])
            np.testing.assert_array_equal(curve.thresholds, base.thresholds)
            np.testing.assert_array_equal(curve.precision, base.precision)
            assert curve.auc == base.auc

    def test_no_positives(self):
        with pytest.raises(EvaluationError, match="no positive"):
            pr_curve([0.1, 0.2], [0, 0])

    def test_non_finite_scores(self):
        with pytest.raises(EvaluationError, match="finite"):
            pr_curve([0.1, np.nan], [1, 0])

    def test_length_mismatch(self):
        with pytest.raises(EvaluationError):
            pr_curve([0.1, 0.2], [1])

    def test_write_curve(self, tmp_path):
        path = write_curve(pr_curve([0.9, 0.1], [1, 0]), tmp_path / "c.csv")
        assert path.read_text(encoding='utf-8').splitlines()[0] == "threshold,recall,precision"


class TestComparison:
    @pytest.fixture
    def frame(self):
        rng = np.random.default_rng(5)
        n = 400
        label = (rng.random(n) < 0.2).astype(int)
        return pd.DataFrame({
            "doc_id": [f"d{i % 8}" for i in range(n)],
            "phrase": [f"p{i}" for i in range(n)],
            "label": label,
            "weight": np.where(label == 1, 1.0, 0.1),
            "signal": label + rng.normal(scale=0.7, size=n),
            "noise": rng.normal(size=n),
        })

    def test_informative_feature_wins(self, frame):
        specs = [ModelSpec("noise", ("noise",)), ModelSpec("signal", ("signal",))]
        comparison = compare_models(specs, frame, seed=1)
        assert comparison.table["model"].tolist() == ["signal", "noise"]
        assert comparison.curves["signal"].auc > comparison.curves["noise"].auc
        assert set(comparison.models) == {"signal", "noise"}

    def test_duplicate_names(self, frame):
        with pytest.raises(EvaluationError, match="unique"):
            compare_models([ModelSpec("a", ("noise",)), ModelSpec("a", ("signal",))], frame)

    def test_holdout_split_is_by_document(self, frame):
        train_rows, eval_rows = split_frame(frame, TrainingConfig(split_mode="holdout"), seed=2)
        assert not set(train_rows["doc_id"]) & set(eval_rows["doc_id"])
        assert len(train_rows) + len(eval_rows) == len(frame)
        assert eval_rows["doc_id"].nunique() == 2

    def test_in_sample_split(self, frame):
        train_rows, eval_rows = split_frame(frame, TrainingConfig(), seed=2)
        assert train_rows is frame and eval_rows is frame
