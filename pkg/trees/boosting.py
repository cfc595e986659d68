# trees/boosting.py
"""
Gradient boosting with logistic loss.

F_0 = log-odds of the (clipped) base rate; each round fits a depth-limited
regression tree to the residuals y - sigmoid(F) and adds shrinkage * tree(x).
First-order only: no Hessian weighting, no column sampling.
"""
from __future__ import annotations
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np
from scipy.special import expit

from common import config
from common.errors import ConfigError, ShapeError
from trees.cart import DecisionTree, TreeConfig, grow_tree

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoostConfig:
    n_rounds: int = config.BOOST_N_ROUNDS
    max_depth: int = config.BOOST_MAX_DEPTH
    shrinkage: float = config.BOOST_SHRINKAGE
    min_samples_leaf: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.n_rounds < 0:
            raise ConfigError(f"n_rounds must be >= 0, got {self.n_rounds}")
        if self.shrinkage < 0:
            raise ConfigError(f"shrinkage must be >= 0, got {self.shrinkage}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class BoostedTrees:
    init_score: float
    trees: List[DecisionTree] = field(repr=False)
    config: BoostConfig = BoostConfig()
    loss_history: tuple = ()

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        score = np.full(X.shape[0], self.init_score, dtype=np.float64)
        for tree in self.trees:
            score += self.config.shrinkage * tree.predict_value(X)
        return score

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return expit(self.decision_function(X))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.decision_function(X) > 0).astype(np.int8)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "init_score": self.init_score,
            "config": self.config.to_dict(),
            "trees": [t.to_dict() for t in self.trees],
            "loss_history": list(self.loss_history),
        }

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "BoostedTrees":
        return BoostedTrees(
            init_score=float(d["init_score"]),
            trees=[DecisionTree.from_dict(t) for t in d["trees"]],
            config=BoostConfig(**d["config"]),
            loss_history=tuple(d.get("loss_history", ())),
        )


def logistic_loss(y: np.ndarray, score: np.ndarray) -> float:
    yp = 2.0 * y - 1.0
    return float(np.mean(np.logaddexp(0.0, -yp * score)))


def base_score(y: np.ndarray) -> float:
    p = min(max(float(np.mean(y)), config.PROBA_CLIP), 1.0 - config.PROBA_CLIP)
    return math.log(p / (1.0 - p))


def train_gbt(X, y: Sequence[int], cfg: BoostConfig = BoostConfig()) -> BoostedTrees:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] == 0:
        raise ShapeError("cannot train boosted trees on empty data")
    if X.shape[0] != len(y):
        raise ShapeError(f"{X.shape[0]} rows but {len(y)} labels")

    f0 = base_score(y)
    score = np.full(len(y), f0)
    tcfg = TreeConfig(max_depth=cfg.max_depth, min_samples_leaf=cfg.min_samples_leaf,
                      max_features="all", seed=cfg.seed)
    trees: List[DecisionTree] = []
    history = [logistic_loss(y, score)]

    for _ in range(cfg.n_rounds):
        residual = y - expit(score)
        tree = grow_tree(X, residual, tcfg, criterion="sse")
        trees.append(tree)
        score = score + cfg.shrinkage * tree.predict_value(X)
        history.append(logistic_loss(y, score))

    logger.debug("gbt: %d rounds, loss %.5f -> %.5f", cfg.n_rounds, history[0], history[-1])
    return BoostedTrees(init_score=f0, trees=trees, config=cfg, loss_history=tuple(history))
