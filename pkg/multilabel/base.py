# multilabel/base.py
"""Binary base learners behind one interface: scores(X) and predict(X) over CSR rows."""
from __future__ import annotations
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, Optional, Protocol

import numpy as np

from common import config
from common.errors import ConfigError
from linear.model import LinearModel, LossKind, TrainConfig
from linear.sgd import train_linear
from trees.boosting import BoostConfig, BoostedTrees, train_gbt
from trees.forest import Forest, ForestConfig, train_forest
from trees.projection import DenseProjection


class BaseKind(str, Enum):
    LR = "lr"
    SVM = "svm"
    RF = "rf"
    GBT = "gbt"

    @property
    def label(self) -> str:
        return self.name

    @staticmethod
    def parse(raw: str) -> "BaseKind":
        s = (raw or "").strip().lower()
        aliases = {"xgb": "gbt", "xgboost": "gbt", "logistic": "lr", "randomforest": "rf"}
        try:
            return BaseKind(aliases.get(s, s))
        except ValueError:
            raise ConfigError(f"unknown model '{raw}' (expected lr, svm, rf or gbt)") from None


@dataclass(frozen=True)
class BaseConfig:
    kind: BaseKind = BaseKind.LR
    linear: TrainConfig = TrainConfig()
    forest: ForestConfig = ForestConfig()
    boost: BoostConfig = BoostConfig()
    top_k: int = config.TREE_TOP_K

    def __post_init__(self):
        if self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {self.top_k}")

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {"kind": self.kind.value}
        if self.kind in (BaseKind.LR, BaseKind.SVM):
            d["linear"] = self.linear.to_dict()
        elif self.kind is BaseKind.RF:
            d["forest"] = self.forest.to_dict()
            d["top_k"] = self.top_k
        else:
            d["boost"] = self.boost.to_dict()
            d["top_k"] = self.top_k
        return d


class BaseModel(Protocol):
    kind: BaseKind

    def scores(self, X) -> np.ndarray: ...

    def predict(self, X) -> np.ndarray: ...

    def to_dict(self) -> Dict[str, Any]: ...


@dataclass(frozen=True, eq=False)
class LinearBase:
    kind: BaseKind
    model: LinearModel

    def scores(self, X) -> np.ndarray:
        return self.model.decision_function(X)

    def predict(self, X) -> np.ndarray:
        return (self.scores(X) > 0).astype(np.int8)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "model": self.model.to_dict()}


@dataclass(frozen=True, eq=False)
class ForestBase:
    kind: BaseKind
    projection: DenseProjection
    model: Forest

    def scores(self, X) -> np.ndarray:
        return self.model.predict_proba(self.projection.transform(X))

    def predict(self, X) -> np.ndarray:
        return (self.scores(X) > 0.5).astype(np.int8)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "projection": self.projection.to_dict(), "model": self.model.to_dict()}


@dataclass(frozen=True, eq=False)
class BoostBase:
    kind: BaseKind
    projection: DenseProjection
    model: BoostedTrees

    def scores(self, X) -> np.ndarray:
        return self.model.decision_function(self.projection.transform(X))

    def predict(self, X) -> np.ndarray:
        return (self.scores(X) > 0).astype(np.int8)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "projection": self.projection.to_dict(), "model": self.model.to_dict()}


def train_base(X, y, cfg: BaseConfig, seed: int, sparse_width: Optional[int] = None,
               cf: Optional[np.ndarray] = None) -> BaseModel:
    """
    X is CSR. `sparse_width` marks where the TF-IDF block ends; tree learners
    rank only those columns, by `cf` when given, and keep everything after it.
    """
    if cfg.kind in (BaseKind.LR, BaseKind.SVM):
        loss = LossKind.LOGISTIC if cfg.kind is BaseKind.LR else LossKind.HINGE
        return LinearBase(cfg.kind, train_linear(X, y, replace(cfg.linear, loss_kind=loss, seed=seed)))

    proj = DenseProjection.fit(X, sparse_width=sparse_width, top_k=cfg.top_k, cf=cf)
    Xd = proj.transform(X)
    if cfg.kind is BaseKind.RF:
        return ForestBase(cfg.kind, proj, train_forest(Xd, y, replace(cfg.forest, seed=seed)))
    return BoostBase(cfg.kind, proj, train_gbt(Xd, y, replace(cfg.boost, seed=seed)))


def base_from_dict(d: Dict[str, Any]) -> BaseModel:
    kind = BaseKind(d["kind"])
    if kind in (BaseKind.LR, BaseKind.SVM):
        return LinearBase(kind, LinearModel.from_dict(d["model"]))
    proj = DenseProjection.from_dict(d["projection"])
    if kind is BaseKind.RF:
        return ForestBase(kind, proj, Forest.from_dict(d["model"]))
    return BoostBase(kind, proj, BoostedTrees.from_dict(d["model"]))
