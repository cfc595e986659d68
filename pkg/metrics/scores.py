# metrics/scores.py
"""
Multi-label scores over N x L bit matrices. 0/0 is 0 everywhere except the
Jaccard row score, where two empty label sets count as a perfect match.
"""
from __future__ import annotations
from typing import Any, Dict, List, Tuple

import numpy as np

from common import config
from common.errors import ShapeError


def _pair(Y, Y_hat) -> Tuple[np.ndarray, np.ndarray]:
    Y = np.asarray(Y, dtype=np.int8)
    Y_hat = np.asarray(Y_hat, dtype=np.int8)
    if Y.ndim != 2 or Y.shape != Y_hat.shape:
        raise ShapeError(f"label matrices must share an N x L shape, got {Y.shape} and {Y_hat.shape}")
    return Y, Y_hat


def _ratio(num: float, den: float) -> float:
    return float(num) / float(den) if den else 0.0


class ConfusionCounts:
    """
    Per-label TP/FP/FN/TN accumulator. Feed it batches with update();
    snapshot() gives the per-label breakdown and the pooled sums.
    """

    def __init__(self, n_labels: int = config.N_LABELS):
        self.n_labels = n_labels
        self.tp = np.zeros(n_labels, dtype=np.int64)
        self.fp = np.zeros(n_labels, dtype=np.int64)
        self.fn = np.zeros(n_labels, dtype=np.int64)
        self.tn = np.zeros(n_labels, dtype=np.int64)
        self.n = 0

    # ----------------------------
    # EVENTS
    # ----------------------------

    def update(self, Y, Y_hat) -> None:
        Y, Y_hat = _pair(Y, Y_hat)
        if Y.shape[1] != self.n_labels:
            raise ShapeError(f"expected {self.n_labels} label columns, got {Y.shape[1]}")
        t, p = Y == 1, Y_hat == 1
        self.tp += np.sum(t & p, axis=0)
        self.fp += np.sum(~t & p, axis=0)
        self.fn += np.sum(t & ~p, axis=0)
        self.tn += np.sum(~t & ~p, axis=0)
        self.n += Y.shape[0]

    # ----------------------------
    # VIEWS
    # ----------------------------

    @property
    def pooled(self) -> Tuple[int, int, int, int]:
        return int(self.tp.sum()), int(self.fp.sum()), int(self.fn.sum()), int(self.tn.sum())

    def per_label(self) -> List[Dict[str, Any]]:
        out = []
        for j in range(self.n_labels):
            tp, fp, fn, tn = int(self.tp[j]), int(self.fp[j]), int(self.fn[j]), int(self.tn[j])
            p, r = _ratio(tp, tp + fp), _ratio(tp, tp + fn)
            name = config.LABEL_COLUMNS[j] if self.n_labels == config.N_LABELS else str(j)
            out.append({
                "label": name,
                "tp": tp, "fp": fp, "fn": fn, "tn": tn,
                "precision": p,
                "recall": r,
                "f1": _ratio(2 * p * r, p + r),
            })
        return out

    def snapshot(self) -> Dict[str, Any]:
        tp, fp, fn, tn = self.pooled
        return {"n": self.n, "tp": tp, "fp": fp, "fn": fn, "tn": tn, "per_label": self.per_label()}


def micro_prf(Y, Y_hat) -> Tuple[float, float, float]:
    cc = ConfusionCounts(np.asarray(Y).shape[1] if np.ndim(Y) == 2 else config.N_LABELS)
    cc.update(Y, Y_hat)
    tp, fp, fn, _ = cc.pooled
    p, r = _ratio(tp, tp + fp), _ratio(tp, tp + fn)
    return p, r, _ratio(2 * p * r, p + r)


def exact_match_accuracy(Y, Y_hat) -> float:
    Y, Y_hat = _pair(Y, Y_hat)
    if Y.shape[0] == 0:
        return 0.0
    return float(np.mean(np.all(Y == Y_hat, axis=1)))


def hamming_loss(Y, Y_hat) -> float:
    Y, Y_hat = _pair(Y, Y_hat)
    if Y.size == 0:
        return 0.0
    return float(np.sum(Y != Y_hat)) / Y.size


def jaccard_accuracy(Y, Y_hat) -> float:
    """Mean per-row |Y & Y_hat| / |Y | Y_hat|."""
    Y, Y_hat = _pair(Y, Y_hat)
    if Y.shape[0] == 0:
        return 0.0
    inter = np.sum((Y == 1) & (Y_hat == 1), axis=1).astype(np.float64)
    union = np.sum((Y == 1) | (Y_hat == 1), axis=1).astype(np.float64)
    rows = np.where(union > 0, inter / np.where(union > 0, union, 1.0), 1.0)
    return float(np.mean(rows))
