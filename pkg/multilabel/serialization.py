# multilabel/serialization.py
"""
Model file = one JSON envelope:
  {strategy, order, base_kind, models[4], feature_fingerprint, pipeline, split, ...}
The fingerprint pins the embedded preprocessing/feature config and vocabulary.
"""
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from common.errors import FingerprintError, ValidationError
from common.utils import fingerprint, read_json, write_json
from features.embeddings import EmbeddingTable
from features.pipeline import FeaturePipeline
from multilabel.strategies import MultiLabelModel

logger = logging.getLogger(__name__)

FORMAT = "hci-model/1"


@dataclass(frozen=True, eq=False)
class ModelBundle:
    model: MultiLabelModel
    pipeline: FeaturePipeline
    split: Dict[str, Any] = field(default_factory=dict)
    config_key: str = ""

    def to_dict(self) -> Dict[str, Any]:
        d = self.model.to_dict()
        d.update({
            "format": FORMAT,
            "feature_fingerprint": self.pipeline.fingerprint(),
            "pipeline": self.pipeline.to_dict(),
            "split": dict(self.split),
            "config_key": self.config_key,
        })
        return d


def save_model(path: str, bundle: ModelBundle) -> None:
    write_json(path, bundle.to_dict())
    logger.info("model written to %s", path)


def bundle_from_dict(d: Dict[str, Any], embedding_path: Optional[str] = None,
                     table: Optional[EmbeddingTable] = None) -> ModelBundle:
    if d.get("format") != FORMAT:
        raise ValidationError(f"not a model file (format={d.get('format')!r})")
    expected = d.get("feature_fingerprint")
    actual = fingerprint(d["pipeline"])
    if expected != actual:
        raise FingerprintError(
            f"feature fingerprint mismatch: model says {expected}, embedded pipeline hashes to {actual}"
        )
    pipeline = FeaturePipeline.from_dict(d["pipeline"], embedding_path=embedding_path, table=table)
    model = MultiLabelModel.from_dict(d)
    if model.feature_width != pipeline.width:
        raise FingerprintError(f"model width {model.feature_width} != pipeline width {pipeline.width}")
    return ModelBundle(model=model, pipeline=pipeline, split=d.get("split", {}), config_key=d.get("config_key", ""))


def load_model(path: str, embedding_path: Optional[str] = None,
               table: Optional[EmbeddingTable] = None) -> ModelBundle:
    return bundle_from_dict(read_json(path), embedding_path=embedding_path, table=table)
