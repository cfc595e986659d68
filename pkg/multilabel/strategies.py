# multilabel/strategies.py
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from joblib import Parallel, delayed

from common import config
from common.errors import ConfigError, ShapeError
from corpus.document import LabelVector
from features.stack import FeatureVector
from multilabel.base import BaseConfig, BaseKind, BaseModel, base_from_dict, train_base

logger = logging.getLogger(__name__)

DEFAULT_ORDER = tuple(range(config.N_LABELS))


class Strategy(str, Enum):
    OVR = "ovr"
    CC = "cc"

    @property
    def label(self) -> str:
        return "OvR" if self is Strategy.OVR else "CC"

    @staticmethod
    def parse(raw: str) -> "Strategy":
        s = (raw or "").strip().lower()
        aliases = {"onevsrest": "ovr", "one-vs-rest": "ovr", "chain": "cc", "classifierchain": "cc"}
        try:
            return Strategy(aliases.get(s, s))
        except ValueError:
            raise ConfigError(f"unknown strategy '{raw}' (expected ovr or cc)") from None


@dataclass(frozen=True)
class ChainConfig:
    order: Tuple[int, ...] = DEFAULT_ORDER
    augmentation_scale: float = 1.0

    def __post_init__(self):
        if sorted(self.order) != list(range(config.N_LABELS)):
            raise ConfigError(f"chain order must be a permutation of 0..{config.N_LABELS - 1}, got {self.order}")


@dataclass(frozen=True, eq=False)
class MultiLabelModel:
    strategy: Strategy
    base_kind: BaseKind
    models: List[BaseModel] = field(repr=False)     # indexed by label column
    feature_width: int
    order: Tuple[int, ...] = DEFAULT_ORDER
    augmentation_scale: float = 1.0
    seed: int = 0
    base_config: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.models) != config.N_LABELS:
            raise ShapeError(f"expected {config.N_LABELS} base models, got {len(self.models)}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "strategy": self.strategy.value,
            "base_kind": self.base_kind.value,
            "order": list(self.order),
            "augmentation_scale": self.augmentation_scale,
            "feature_width": self.feature_width,
            "seed": self.seed,
            "base_config": self.base_config,
            "models": [m.to_dict() for m in self.models],
        }

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "MultiLabelModel":
        return MultiLabelModel(
            strategy=Strategy(d["strategy"]),
            base_kind=BaseKind(d["base_kind"]),
            models=[base_from_dict(m) for m in d["models"]],
            feature_width=int(d["feature_width"]),
            order=tuple(int(i) for i in d["order"]),
            augmentation_scale=float(d.get("augmentation_scale", 1.0)),
            seed=int(d.get("seed", 0)),
            base_config=d.get("base_config", {}),
        )


@dataclass(frozen=True)
class Prediction:
    bits: np.ndarray       # N x 4 int8, raw
    scores: np.ndarray     # N x 4 float

    def __len__(self) -> int:
        return self.bits.shape[0]


def label_seed(seed: int, j: int, shared: bool = False) -> int:
    return int(seed) if shared else int(seed) + j


def _check(X, Y) -> Tuple[sp.csr_matrix, np.ndarray]:
    X = sp.csr_matrix(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.int8)
    if Y.ndim != 2 or Y.shape[1] != config.N_LABELS:
        raise ShapeError(f"label matrix must be N x {config.N_LABELS}, got {Y.shape}")
    if X.shape[0] != Y.shape[0]:
        raise ShapeError(f"{X.shape[0]} feature rows but {Y.shape[0]} label rows")
    if X.shape[0] == 0:
        raise ShapeError("no training rows")
    return X, Y


def _augment(X: sp.csr_matrix, labels: np.ndarray, scale: float) -> sp.csr_matrix:
    """Append the given label columns (times scale) after the existing features."""
    if labels.shape[1] == 0:
        return X
    extra = sp.csr_matrix(scale * labels.astype(np.float64))
    return sp.hstack([X, extra], format="csr")


# ------------------------------
# Training
# ------------------------------

def train_ovr(X, Y, base: BaseConfig, seed: int = 0, shared_seed: bool = False,
              sparse_width: Optional[int] = None, n_jobs: int = 1,
              cf: Optional[np.ndarray] = None) -> MultiLabelModel:
    """One independent binary model per label column."""
    X, Y = _check(X, Y)
    jobs = [(j, label_seed(seed, j, shared_seed)) for j in range(config.N_LABELS)]
    if n_jobs == 1:
        models = [train_base(X, Y[:, j], base, s, sparse_width, cf) for j, s in jobs]
    else:
        models = Parallel(n_jobs=n_jobs)(delayed(train_base)(X, Y[:, j], base, s, sparse_width, cf) for j, s in jobs)
    return MultiLabelModel(
        strategy=Strategy.OVR,
        base_kind=base.kind,
        models=list(models),
        feature_width=X.shape[1],
        seed=seed,
        base_config=base.to_dict(),
    )


def train_chain(X, Y, base: BaseConfig, seed: int = 0, chain: ChainConfig = ChainConfig(),
                sparse_width: Optional[int] = None, cf: Optional[np.ndarray] = None) -> MultiLabelModel:
    """
    Model for order[k] sees X plus the gold labels of order[:k]; at inference
    the predicted labels take their place.
    """
    X, Y = _check(X, Y)
    models: List[Optional[BaseModel]] = [None] * config.N_LABELS
    for k, j in enumerate(chain.order):
        Xk = _augment(X, Y[:, list(chain.order[:k])], chain.augmentation_scale)
        models[j] = train_base(Xk, Y[:, j], base, label_seed(seed, j), sparse_width, cf)
    return MultiLabelModel(
        strategy=Strategy.CC,
        base_kind=base.kind,
        models=models,
        feature_width=X.shape[1],
        order=chain.order,
        augmentation_scale=chain.augmentation_scale,
        seed=seed,
        base_config=base.to_dict(),
    )


# ------------------------------
# Inference
# ------------------------------

def predict_batch(model: MultiLabelModel, X) -> Prediction:
    X = sp.csr_matrix(X, dtype=np.float64)
    if X.shape[1] != model.feature_width:
        raise ShapeError(f"feature width {X.shape[1]} != model width {model.feature_width}")
    n = X.shape[0]
    bits = np.zeros((n, config.N_LABELS), dtype=np.int8)
    scores = np.zeros((n, config.N_LABELS), dtype=np.float64)
    if n == 0:
        return Prediction(bits, scores)

    if model.strategy is Strategy.OVR:
        for j, m in enumerate(model.models):
            scores[:, j] = m.scores(X)
            bits[:, j] = m.predict(X)
        return Prediction(bits, scores)

    for k, j in enumerate(model.order):
        Xk = _augment(X, bits[:, list(model.order[:k])], model.augmentation_scale)
        m = model.models[j]
        scores[:, j] = m.scores(Xk)
        bits[:, j] = m.predict(Xk)
    return Prediction(bits, scores)


def predict(model: MultiLabelModel, x) -> LabelVector:
    """Raw (not post-processed) labels for one feature row."""
    if isinstance(x, FeatureVector):
        x = x.to_csr()
    X = sp.csr_matrix(x if sp.issparse(x) else np.atleast_2d(np.asarray(x, dtype=np.float64)))
    if X.shape[0] != 1:
        raise ShapeError(f"expected one feature row, got {X.shape[0]}")
    return LabelVector.from_bits(predict_batch(model, X).bits[0].tolist())


def consistency_postprocess(raw: LabelVector) -> LabelVector:
    """non_human_centric is set exactly when the three category bits are all 0."""
    au, inc, ur, _ = raw.bits()
    return LabelVector(au, inc, ur, 0 if (au or inc or ur) else 1)


def consistency_postprocess_matrix(bits: np.ndarray) -> np.ndarray:
    out = np.array(bits, dtype=np.int8, copy=True)
    if out.shape[0]:
        out[:, 3] = (out[:, :3].sum(axis=1) == 0).astype(np.int8)
    return out
