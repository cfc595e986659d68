# linear/model.py
from __future__ import annotations
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from common import config
from common.errors import ConfigError, ShapeError
from features.stack import FeatureVector


class LossKind(str, Enum):
    LOGISTIC = "logistic"     # LR
    HINGE = "hinge"           # linear SVM


@dataclass(frozen=True)
class TrainConfig:
    loss_kind: LossKind = LossKind.LOGISTIC
    l2_lambda: float = config.L2_LAMBDA
    epochs: int = config.EPOCHS
    learning_rate: float = config.LEARNING_RATE
    seed: int = 0
    tolerance: float = config.TOLERANCE

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.l2_lambda < 0:
            raise ConfigError(f"l2_lambda must be >= 0, got {self.l2_lambda}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        # the per-step shrink factor (1 - lr * lambda) must stay positive
        if self.learning_rate * self.l2_lambda >= 1.0:
            raise ConfigError("learning_rate * l2_lambda must be < 1")
        if self.tolerance < 0:
            raise ConfigError(f"tolerance must be >= 0, got {self.tolerance}")

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["loss_kind"] = self.loss_kind.value
        return d

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "TrainConfig":
        d = dict(d)
        d["loss_kind"] = LossKind(d["loss_kind"])
        return TrainConfig(**d)


Row = Union[np.ndarray, sp.spmatrix, FeatureVector]


@dataclass(frozen=True, eq=False)
class LinearModel:
    weights: np.ndarray = field(repr=False)
    bias: float
    loss_kind: LossKind
    config: TrainConfig = TrainConfig()
    loss_history: Tuple[float, ...] = ()

    @property
    def width(self) -> int:
        return len(self.weights)

    def decision_function(self, X) -> np.ndarray:
        """w.x + b for every row of X (CSR or dense)."""
        if X.shape[1] != self.width:
            raise ShapeError(f"feature width {X.shape[1]} != model width {self.width}")
        return np.asarray(X @ self.weights, dtype=np.float64).ravel() + self.bias

    def predict_proba(self, X) -> np.ndarray:
        if self.loss_kind is not LossKind.LOGISTIC:
            raise ConfigError("probabilities are only defined for the logistic model")
        return expit(self.decision_function(X))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "loss_kind": self.loss_kind.value,
            "bias": float(self.bias),
            "weights": self.weights.tolist(),
            "config": self.config.to_dict(),
            "loss_history": list(self.loss_history),
        }

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "LinearModel":
        return LinearModel(
            weights=np.asarray(d["weights"], dtype=np.float64),
            bias=float(d["bias"]),
            loss_kind=LossKind(d["loss_kind"]),
            config=TrainConfig.from_dict(d["config"]),
            loss_history=tuple(d.get("loss_history", ())),
        )


def _as_row(x: Row, width: int):
    if isinstance(x, FeatureVector):
        x = x.to_csr()
    if sp.issparse(x):
        if x.shape != (1, width):
            raise ShapeError(f"feature width {x.shape[1]} != model width {width}")
        return x
    x = np.asarray(x, dtype=np.float64).ravel()
    if len(x) != width:
        raise ShapeError(f"feature width {len(x)} != model width {width}")
    return x.reshape(1, -1)


def predict_score(model: LinearModel, x: Row) -> float:
    return float(model.decision_function(_as_row(x, model.width))[0])


def predict_label(model: LinearModel, x: Row, threshold: float = 0.0) -> int:
    """1 iff score > threshold (strict)."""
    return int(predict_score(model, x) > threshold)
