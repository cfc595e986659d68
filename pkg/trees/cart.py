# trees/cart.py
"""
Greedy CART on dense matrices.

Two criteria share one builder:
  gini - binary classification, leaf value = weighted class-1 fraction
  sse  - regression (boosting residuals), leaf value = weighted mean target

Samples go left when x[feature] <= threshold. Sample weights are integer
multiplicities (bootstrap); rows with weight 0 are not part of the tree.
"""
from __future__ import annotations
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from common import config
from common.errors import ConfigError, ShapeError
from common.utils import rng

_EPS = 1e-12


def gini(counts: Tuple[float, float]) -> float:
    """1 - p0^2 - p1^2; an empty node is 0."""
    n0, n1 = counts
    total = n0 + n1
    if total <= 0:
        return 0.0
    p0, p1 = n0 / total, n1 / total
    return 1.0 - p0 * p0 - p1 * p1


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = config.FOREST_MAX_DEPTH
    min_samples_leaf: int = config.FOREST_MIN_SAMPLES_LEAF
    max_features: str = "all"          # "all" | "sqrt"
    seed: int = 0

    def __post_init__(self):
        if self.max_depth < 0:
            raise ConfigError(f"max_depth must be >= 0, got {self.max_depth}")
        if self.min_samples_leaf < 1:
            raise ConfigError(f"min_samples_leaf must be >= 1, got {self.min_samples_leaf}")
        if self.max_features not in ("all", "sqrt"):
            raise ConfigError(f"max_features must be 'all' or 'sqrt', got '{self.max_features}'")


@dataclass(frozen=True, eq=False)
class DecisionTree:
    """Flat node arrays; feature == -1 marks a leaf."""
    feature: np.ndarray = field(repr=False)
    threshold: np.ndarray = field(repr=False)
    left: np.ndarray = field(repr=False)
    right: np.ndarray = field(repr=False)
    value: np.ndarray = field(repr=False)
    max_depth: int = 0

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    def depth(self) -> int:
        def walk(i: int) -> int:
            if self.feature[i] < 0:
                return 0
            return 1 + max(walk(self.left[i]), walk(self.right[i]))
        return walk(0)

    def predict_value(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        active = self.feature[node] >= 0
        while active.any():
            r = rows[active]
            nd = node[r]
            go_left = X[r, self.feature[nd]] <= self.threshold[nd]
            node[r] = np.where(go_left, self.left[nd], self.right[nd])
            active = self.feature[node] >= 0
        return self.value[node]

    def to_dict(self) -> Dict[str, Any]:
        nodes = []
        for i in range(self.n_nodes):
            if self.feature[i] < 0:
                nodes.append({"value": float(self.value[i])})
            else:
                nodes.append({
                    "feature": int(self.feature[i]),
                    "threshold": float(self.threshold[i]),
                    "left": int(self.left[i]),
                    "right": int(self.right[i]),
                    "value": float(self.value[i]),
                })
        return {"max_depth": self.max_depth, "nodes": nodes}

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "DecisionTree":
        nodes = d["nodes"]
        return DecisionTree(
            feature=np.array([n.get("feature", -1) for n in nodes], dtype=np.int64),
            threshold=np.array([n.get("threshold", 0.0) for n in nodes], dtype=np.float64),
            left=np.array([n.get("left", -1) for n in nodes], dtype=np.int64),
            right=np.array([n.get("right", -1) for n in nodes], dtype=np.int64),
            value=np.array([n["value"] for n in nodes], dtype=np.float64),
            max_depth=int(d.get("max_depth", 0)),
        )


# ------------------------------
# Builder
# ------------------------------

@dataclass
class _Split:
    feature: int
    threshold: float
    impurity: float


class _Builder:
    def __init__(self, X: np.ndarray, target: np.ndarray, weights: np.ndarray,
                 cfg: TreeConfig, criterion: str):
        self.X = X
        self.t = target
        self.w = weights
        self.cfg = cfg
        self.criterion = criterion
        self.n, self.k = X.shape
        # one stable sort per column, reused by every large node
        self.order = np.argsort(X, axis=0, kind="stable")
        self.g = rng(cfg.seed)
        if cfg.max_features == "sqrt":
            self.n_candidates = max(1, int(math.sqrt(self.k)))
        else:
            self.n_candidates = self.k

        self.feature: List[int] = []
        self.threshold: List[float] = []
        self.left: List[int] = []
        self.right: List[int] = []
        self.value: List[float] = []

    # impurity of a node from weighted sums
    def _impurity(self, W, T, TT):
        if self.criterion == "gini":
            p = T / W
            return 2.0 * p * (1.0 - p)
        return (TT - T * T / W) / W

    def _leaf_value(self, W: float, T: float) -> float:
        return T / W if W > 0 else 0.0

    def _candidates(self) -> np.ndarray:
        if self.n_candidates >= self.k:
            return np.arange(self.k)
        return np.sort(self.g.choice(self.k, size=self.n_candidates, replace=False))

    def _sorted_members(self, f: int, idx: np.ndarray, mask: np.ndarray) -> np.ndarray:
        if len(idx) * 8 < self.n:
            return idx[np.argsort(self.X[idx, f], kind="stable")]
        col = self.order[:, f]
        return col[mask[col]]

    def _best_split(self, idx: np.ndarray, parent_imp: float) -> Optional[_Split]:
        mask = np.zeros(self.n, dtype=bool)
        mask[idx] = True
        min_leaf = self.cfg.min_samples_leaf
        best: Optional[_Split] = None

        for f in self._candidates():
            members = self._sorted_members(int(f), idx, mask)
            x = self.X[members, f]
            steps = np.flatnonzero(x[:-1] < x[1:])
            if len(steps) == 0:
                continue
            w = self.w[members]
            tw = w * self.t[members]
            cw = np.cumsum(w)
            ct = np.cumsum(tw)
            ctt = np.cumsum(tw * self.t[members])
            W, T, TT = cw[-1], ct[-1], ctt[-1]

            WL, TL, TTL = cw[steps], ct[steps], ctt[steps]
            WR, TR, TTR = W - WL, T - TL, TT - TTL
            ok = (WL >= min_leaf) & (WR >= min_leaf)
            if not ok.any():
                continue
            with np.errstate(divide="ignore", invalid="ignore"):
                imp = (WL * self._impurity(WL, TL, TTL) + WR * self._impurity(WR, TR, TTR)) / W
            imp = np.where(ok, imp, np.inf)
            j = int(np.argmin(imp))       # first minimum = lowest threshold
            if not np.isfinite(imp[j]):
                continue
            if best is None or imp[j] < best.impurity:
                lo, hi = x[steps[j]], x[steps[j] + 1]
                thr = 0.5 * (lo + hi)
                if not (lo <= thr < hi):
                    thr = lo
                best = _Split(feature=int(f), threshold=float(thr), impurity=float(imp[j]))

        if best is None or best.impurity >= parent_imp - _EPS:
            return None
        return best

    def _new_node(self, value: float) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        return len(self.feature) - 1

    def build(self, idx: np.ndarray, depth: int) -> int:
        w = self.w[idx]
        tw = w * self.t[idx]
        W, T, TT = float(w.sum()), float(tw.sum()), float((tw * self.t[idx]).sum())
        node = self._new_node(self._leaf_value(W, T))
        parent_imp = self._impurity(W, T, TT)

        if depth >= self.cfg.max_depth or parent_imp <= _EPS or W < 2 * self.cfg.min_samples_leaf:
            return node
        split = self._best_split(idx, parent_imp)
        if split is None:
            return node

        go_left = self.X[idx, split.feature] <= split.threshold
        self.feature[node] = split.feature
        self.threshold[node] = split.threshold
        left = self.build(idx[go_left], depth + 1)
        right = self.build(idx[~go_left], depth + 1)
        self.left[node] = left
        self.right[node] = right
        return node

    def result(self) -> DecisionTree:
        return DecisionTree(
            feature=np.array(self.feature, dtype=np.int64),
            threshold=np.array(self.threshold, dtype=np.float64),
            left=np.array(self.left, dtype=np.int64),
            right=np.array(self.right, dtype=np.int64),
            value=np.array(self.value, dtype=np.float64),
            max_depth=self.cfg.max_depth,
        )


def _check(X, y) -> Tuple[np.ndarray, np.ndarray]:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] == 0:
        raise ShapeError("cannot train a tree on empty data")
    if X.shape[0] != len(y):
        raise ShapeError(f"{X.shape[0]} rows but {len(y)} targets")
    return X, y


def grow_tree(X, target, cfg: TreeConfig, criterion: str = "gini",
              sample_weight: Optional[np.ndarray] = None) -> DecisionTree:
    X, target = _check(X, target)
    w = np.ones(len(target)) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
    if len(w) != len(target):
        raise ShapeError(f"{len(w)} weights for {len(target)} rows")
    idx = np.flatnonzero(w > 0)
    if len(idx) == 0:
        raise ShapeError("all sample weights are zero")
    b = _Builder(X, target, w, cfg, criterion)
    b.build(idx, 0)
    return b.result()


def train_tree(X, y, cfg: TreeConfig = TreeConfig(), sample_weight: Optional[np.ndarray] = None) -> DecisionTree:
    """Gini classification tree; leaves hold the class-1 fraction (label = value > 0.5)."""
    y = np.asarray(y).ravel()
    if len(y) and not np.isin(y, (0, 1)).all():
        raise ShapeError("labels must be 0/1")
    return grow_tree(X, y, cfg, "gini", sample_weight)
