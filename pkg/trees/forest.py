# trees/forest.py
from __future__ import annotations
import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np
from joblib import Parallel, delayed

from common import config
from common.errors import ConfigError, ShapeError
from common.utils import derive_seed, rng
from trees.cart import DecisionTree, TreeConfig, train_tree

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = config.FOREST_N_TREES
    max_depth: int = config.FOREST_MAX_DEPTH
    min_samples_leaf: int = config.FOREST_MIN_SAMPLES_LEAF
    feature_subsample: str = config.FOREST_FEATURE_SUBSAMPLE
    bootstrap: bool = config.FOREST_BOOTSTRAP
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        if self.n_trees < 1:
            raise ConfigError(f"n_trees must be >= 1, got {self.n_trees}")

    def tree_config(self, t: int) -> TreeConfig:
        return TreeConfig(
            max_depth=self.max_depth,
            min_samples_leaf=self.min_samples_leaf,
            max_features=self.feature_subsample,
            seed=self.seed + t,
        )

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d.pop("n_jobs")
        return d


@dataclass(frozen=True, eq=False)
class Forest:
    trees: List[DecisionTree] = field(repr=False)
    config: ForestConfig = ForestConfig()

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Mean over trees of the leaf class-1 fraction."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        total = np.zeros(X.shape[0], dtype=np.float64)
        for tree in self.trees:
            total += tree.predict_value(X)
        return total / len(self.trees)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X) > 0.5).astype(np.int8)

    def to_dict(self) -> Dict[str, Any]:
        return {"config": self.config.to_dict(), "trees": [t.to_dict() for t in self.trees]}

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "Forest":
        return Forest(trees=[DecisionTree.from_dict(t) for t in d["trees"]],
                      config=ForestConfig(**d["config"]))


def _bootstrap_weights(n: int, seed: int) -> np.ndarray:
    draws = rng(derive_seed(seed, "bootstrap")).integers(0, n, size=n)
    return np.bincount(draws, minlength=n).astype(np.float64)


def _fit_one(X: np.ndarray, y: np.ndarray, cfg: ForestConfig, t: int) -> DecisionTree:
    tcfg = cfg.tree_config(t)
    weights = _bootstrap_weights(len(y), tcfg.seed) if cfg.bootstrap else None
    return train_tree(X, y, tcfg, sample_weight=weights)


def train_forest(X, y: Sequence[int], cfg: ForestConfig = ForestConfig()) -> Forest:
    """Bootstrap-sampled sqrt-feature trees; tree t uses seed + t."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.int64).ravel()
    if X.shape[0] == 0:
        raise ShapeError("cannot train a forest on empty data")
    if cfg.n_jobs == 1:
        trees = [_fit_one(X, y, cfg, t) for t in range(cfg.n_trees)]
    else:
        trees = Parallel(n_jobs=cfg.n_jobs)(delayed(_fit_one)(X, y, cfg, t) for t in range(cfg.n_trees))
    logger.debug("forest: %d trees, %d leaves total", len(trees), sum(t.n_leaves for t in trees))
    return Forest(trees=list(trees), config=cfg)
