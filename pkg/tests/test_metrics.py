# tests/test_metrics.py
import numpy as np
import pytest
from sklearn import metrics as skm

from common.errors import DataError, ShapeError
from features.pipeline import FeatureConfig, FeaturePipeline
from linear.model import TrainConfig
from metrics.report import compute_report, evaluate
from metrics.scores import (
    ConfusionCounts,
    exact_match_accuracy,
    hamming_loss,
    jaccard_accuracy,
    micro_prf,
)
from multilabel.base import BaseConfig, BaseKind
from multilabel.strategies import train_ovr
from textprep.pipeline import PreprocessConfig, preprocess_dataset

Y_TWO = np.array([[1, 0, 0, 0], [0, 1, 1, 0]])
Y_HAT_TWO = np.array([[1, 1, 0, 0], [0, 1, 0, 0]])


def _brute_force(Y, Y_hat):
    tp = fp = fn = 0
    exact = wrong = 0
    jac = 0.0
    for row, hat in zip(Y.tolist(), Y_hat.tolist()):
        inter = union = 0
        for a, b in zip(row, hat):
            tp += a and b
            fp += (not a) and b
            fn += a and (not b)
            wrong += a != b
            inter += a and b
            union += a or b
        exact += row == hat
        jac += inter / union if union else 1.0
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    n = len(Y)
    return p, r, f1, exact / n, wrong / (n * len(Y[0])), jac / n


def test_two_row_example():
    p, r, f1 = micro_prf(Y_TWO, Y_HAT_TWO)
    assert (p, r, f1) == pytest.approx((2 / 3, 2 / 3, 2 / 3))
    assert exact_match_accuracy(Y_TWO, Y_HAT_TWO) == 0.0
    assert hamming_loss(Y_TWO, Y_HAT_TWO) == pytest.approx(0.25)
    assert jaccard_accuracy(Y_TWO, Y_HAT_TWO) == pytest.approx(0.5)


def test_perfect_and_empty_predictions():
    Y = np.array([[1, 0, 1, 0], [0, 0, 0, 1]])
    assert micro_prf(Y, Y) == (1.0, 1.0, 1.0)
    assert hamming_loss(Y, Y) == 0.0
    zeros = np.zeros((3, 4), dtype=int)
    assert micro_prf(zeros, zeros) == (0.0, 0.0, 0.0)
    assert jaccard_accuracy(zeros, zeros) == 1.0
    assert exact_match_accuracy(zeros, zeros) == 1.0
    assert micro_prf(Y, np.zeros_like(Y)) == (0.0, 0.0, 0.0)


def test_random_matrices_match_brute_force_and_sklearn():
    g = np.random.Generator(np.random.PCG64(21))
    for _ in range(200):
        n = int(g.integers(1, 12))
        Y = g.integers(0, 2, size=(n, 4))
        Y_hat = g.integers(0, 2, size=(n, 4))
        p, r, f1 = micro_prf(Y, Y_hat)
        got = (p, r, f1, exact_match_accuracy(Y, Y_hat), hamming_loss(Y, Y_hat), jaccard_accuracy(Y, Y_hat))
        assert got == pytest.approx(_brute_force(Y, Y_hat))

        assert p == pytest.approx(skm.precision_score(Y, Y_hat, average="micro", zero_division=0))
        assert r == pytest.approx(skm.recall_score(Y, Y_hat, average="micro", zero_division=0))
        assert f1 == pytest.approx(skm.f1_score(Y, Y_hat, average="micro", zero_division=0))
        assert got[3] == pytest.approx(skm.accuracy_score(Y, Y_hat))
        assert got[4] == pytest.approx(skm.hamming_loss(Y, Y_hat))
        assert got[5] == pytest.approx(skm.jaccard_score(Y, Y_hat, average="samples", zero_division=1))


def test_metric_ranges():
    g = np.random.Generator(np.random.PCG64(22))
    Y = g.integers(0, 2, size=(30, 4))
    Y_hat = g.integers(0, 2, size=(30, 4))
    p, r, f1 = micro_prf(Y, Y_hat)
    assert min(p, r) - 1e-12 <= f1 <= max(p, r) + 1e-12
    for v in (p, r, f1, exact_match_accuracy(Y, Y_hat), hamming_loss(Y, Y_hat), jaccard_accuracy(Y, Y_hat)):
        assert 0.0 <= v <= 1.0


def test_confusion_counts_accumulate_in_batches():
    g = np.random.Generator(np.random.PCG64(23))
    Y = g.integers(0, 2, size=(40, 4))
    Y_hat = g.integers(0, 2, size=(40, 4))
    whole, parts = ConfusionCounts(), ConfusionCounts()
    whole.update(Y, Y_hat)
    for lo in range(0, 40, 7):
        parts.update(Y[lo:lo + 7], Y_hat[lo:lo + 7])
    assert whole.snapshot() == parts.snapshot()
    tp, fp, fn, tn = whole.pooled
    assert tp + fp + fn + tn == 160 and whole.n == 40
    assert [row["label"] for row in whole.per_label()][-1] == "non_human_centric"


def test_shape_mismatch():
    with pytest.raises(ShapeError):
        hamming_loss(np.zeros((2, 4)), np.zeros((3, 4)))
    with pytest.raises(ShapeError):
        ConfusionCounts().update(np.zeros((2, 3)), np.zeros((2, 3)))


# ------------------------------
# reports
# ------------------------------

def test_compute_report_fields():
    report = compute_report(Y_TWO, Y_HAT_TWO, fingerprint="abc", seed=3)
    assert report.n == 2 and report.fingerprint == "abc" and report.seed == 3
    assert report.metric_row() == {
        "precision": "0.6667", "recall": "0.6667", "accuracy": "0.0000",
        "f1": "0.6667", "hamming_loss": "0.2500",
    }
    assert "F1=0.6667" in report.summary()
    d = report.to_dict()
    assert d["per_label"][0]["tp"] == 1 and "consistent" not in d


def test_evaluate_adds_consistent_variant(synthetic):
    ds = synthetic(60, seed=2)
    docs = preprocess_dataset(ds)
    pipe = FeaturePipeline.fit(docs, PreprocessConfig(), FeatureConfig(analyzer="word", ngram_range=(1, 1)))
    X, Y = pipe.transform(docs), ds.label_matrix()
    model = train_ovr(X, Y, BaseConfig(kind=BaseKind.SVM, linear=TrainConfig(epochs=5)))
    report = evaluate(model, X, Y, fingerprint="f", seed=1)
    assert report.n == 60
    assert report.consistent is not None
    assert report.consistent.consistent is None
    assert "consistent" in report.to_dict()
    with pytest.raises(DataError, match="empty test set"):
        evaluate(model, X[:0], Y[:0])
