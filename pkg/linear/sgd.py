# linear/sgd.py
"""
Per-sample SGD for L2-regularised logistic / hinge loss.

objective = mean(loss(w.x_i + b, y_i)) + (lambda / 2) * ||w||^2, bias unregularised.
Learning rate decays as lr / (1 + epoch); rows are reshuffled each epoch with
PCG64(seed). Weights are kept as w = scale * v so the L2 shrink is O(1) and the
loss step touches only the row's non-zeros.
"""
from __future__ import annotations
import logging
from typing import Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from common import config
from common.errors import ShapeError
from common.utils import rng
from linear.model import LinearModel, LossKind, TrainConfig

logger = logging.getLogger(__name__)


# ------------------------------
# Loss and gradient for one sample
# ------------------------------

def loss_value(kind: LossKind, w: np.ndarray, b: float, x: np.ndarray, y: int) -> float:
    s = float(np.dot(w, x) + b)
    yp = 2 * int(y) - 1
    if kind is LossKind.LOGISTIC:
        return float(np.logaddexp(0.0, -yp * s))
    return max(0.0, 1.0 - yp * s)


def _dloss_ds(kind: LossKind, s: float, y: int) -> float:
    if kind is LossKind.LOGISTIC:
        return float(expit(s)) - y
    yp = 2 * y - 1
    # subgradient 0 at the kink
    return -float(yp) if yp * s < 1.0 else 0.0


def loss_gradient(kind: LossKind, w: np.ndarray, b: float, x: np.ndarray, y: int) -> Tuple[np.ndarray, float]:
    """(d loss / d w, d loss / d b) for one sample, without the L2 term."""
    x = np.asarray(x, dtype=np.float64)
    g = _dloss_ds(kind, float(np.dot(w, x) + b), int(y))
    return g * x, g


def finite_diff_check(kind: LossKind, w: np.ndarray, b: float, x: np.ndarray, y: int, h: float) -> float:
    """Max relative error between the analytic gradient and central differences, over w and b."""
    if not h or h <= 0 or not np.isfinite(h):
        raise ValueError(f"invalid step h={h}")
    w = np.asarray(w, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    gw, gb = loss_gradient(kind, w, b, x, y)

    analytic = list(gw) + [gb]
    numeric = []
    for i in range(len(w)):
        e = np.zeros_like(w)
        e[i] = h
        numeric.append((loss_value(kind, w + e, b, x, y) - loss_value(kind, w - e, b, x, y)) / (2 * h))
    numeric.append((loss_value(kind, w, b + h, x, y) - loss_value(kind, w, b - h, x, y)) / (2 * h))

    worst = 0.0
    for a, n in zip(analytic, numeric):
        rel = abs(a - n) / max(abs(a), abs(n), 1e-12)
        worst = max(worst, rel)
    return worst


def objective(kind: LossKind, X: sp.csr_matrix, y: np.ndarray, w: np.ndarray, b: float, l2_lambda: float) -> float:
    s = np.asarray(X @ w, dtype=np.float64).ravel() + b
    yp = 2.0 * y - 1.0
    if kind is LossKind.LOGISTIC:
        losses = np.logaddexp(0.0, -yp * s)
    else:
        losses = np.maximum(0.0, 1.0 - yp * s)
    return float(losses.mean() + 0.5 * l2_lambda * np.dot(w, w))


# ------------------------------
# Training
# ------------------------------

def _check_inputs(X, y: Sequence[int]) -> Tuple[sp.csr_matrix, np.ndarray]:
    X = sp.csr_matrix(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64).ravel()
    if X.shape[0] != len(y):
        raise ShapeError(f"{X.shape[0]} rows but {len(y)} labels")
    if len(y) == 0:
        raise ShapeError("no training rows")
    if not np.isin(y, (0, 1)).all():
        raise ShapeError("labels must be 0/1")
    return X, y


def train_linear(X, y: Sequence[int], cfg: TrainConfig = TrainConfig()) -> LinearModel:
    X, y = _check_inputs(X, y)
    n, d = X.shape
    kind = cfg.loss_kind
    indptr, indices, data = X.indptr, X.indices, X.data

    v = np.zeros(d, dtype=np.float64)
    scale = 1.0
    b = 0.0
    g = rng(cfg.seed)
    history = []
    prev = None

    for epoch in range(cfg.epochs):
        lr = cfg.learning_rate / (1.0 + epoch)
        shrink = 1.0 - lr * cfg.l2_lambda
        for i in g.permutation(n):
            lo, hi = indptr[i], indptr[i + 1]
            cols, vals = indices[lo:hi], data[lo:hi]
            s = scale * float(np.dot(v[cols], vals)) + b
            gs = _dloss_ds(kind, s, int(y[i]))

            scale *= shrink
            if gs != 0.0:
                v[cols] -= (lr * gs / scale) * vals
                b -= lr * gs
            if scale < config.RESCALE_FLOOR:
                v *= scale
                scale = 1.0

        obj = objective(kind, X, y, scale * v, b, cfg.l2_lambda)
        history.append(obj)
        if prev is not None and abs(prev - obj) < cfg.tolerance:
            logger.debug("early stop at epoch %d (objective %.6g)", epoch + 1, obj)
            break
        prev = obj

    return LinearModel(weights=scale * v, bias=b, loss_kind=kind, config=cfg, loss_history=tuple(history))
