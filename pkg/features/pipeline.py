# features/pipeline.py
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from common import config
from common.errors import ConfigError, EmbeddingError, FingerprintError
from common.utils import fingerprint
from features.embeddings import EmbeddingTable, embed_documents, load_embeddings
from features.stack import stack_blocks
from features.tfidf import ANALYZERS, TfidfModel, fit_tfidf, transform_matrix
from textprep.pipeline import PreprocessConfig, TokenizedDocument, preprocess

logger = logging.getLogger(__name__)


class FeatureKind(str, Enum):
    TFIDF = "tfidf"
    EMBEDDING = "w2v"
    STACKED = "stack"

    @property
    def uses_tfidf(self) -> bool:
        return self is not FeatureKind.EMBEDDING

    @property
    def uses_embeddings(self) -> bool:
        return self is not FeatureKind.TFIDF

    @staticmethod
    def parse(raw: str) -> "FeatureKind":
        s = (raw or "").strip().lower()
        aliases = {"tfidf": "tfidf", "word2vec": "w2v", "w2v": "w2v", "embedding": "w2v",
                   "stack": "stack", "stacked": "stack"}
        if s not in aliases:
            raise ConfigError(f"unknown feature kind '{raw}'")
        return FeatureKind(aliases[s])


# bench/report spelling
FEATURE_LABELS = {FeatureKind.TFIDF: "Tfidf", FeatureKind.EMBEDDING: "Word2vec", FeatureKind.STACKED: "Stacked"}


@dataclass(frozen=True)
class FeatureConfig:
    kind: FeatureKind = FeatureKind.TFIDF
    analyzer: str = config.TFIDF_ANALYZER
    ngram_range: Tuple[int, int] = config.TFIDF_NGRAM
    min_df: int = config.TFIDF_MIN_DF
    embedding_path: Optional[str] = None

    def __post_init__(self):
        if self.analyzer not in ANALYZERS:
            raise ConfigError(f"analyzer must be one of {ANALYZERS}, got '{self.analyzer}'")
        lo, hi = self.ngram_range
        if lo < 1 or hi < lo:
            raise ConfigError(f"invalid ngram range {self.ngram_range}")
        if self.min_df < 1:
            raise ConfigError(f"min_df must be >= 1, got {self.min_df}")

    def to_dict(self) -> Dict[str, Any]:
        # the embedding path is machine-specific; its content is pinned by the table identity
        return {
            "kind": self.kind.value,
            "analyzer": self.analyzer,
            "ngram_range": list(self.ngram_range),
            "min_df": self.min_df,
        }

    @staticmethod
    def from_dict(d: Dict[str, Any], embedding_path: Optional[str] = None) -> "FeatureConfig":
        return FeatureConfig(
            kind=FeatureKind(d["kind"]),
            analyzer=d["analyzer"],
            ngram_range=(int(d["ngram_range"][0]), int(d["ngram_range"][1])),
            min_df=int(d.get("min_df", 1)),
            embedding_path=embedding_path,
        )


@dataclass(frozen=True, eq=False)
class FeaturePipeline:
    """Preprocessing + fitted feature extractors; produces CSR matrices."""
    preprocess: PreprocessConfig
    features: FeatureConfig
    tfidf: Optional[TfidfModel] = None
    embedding: Optional[Dict[str, Any]] = None     # table identity
    table: Optional[EmbeddingTable] = field(default=None, repr=False)

    @property
    def sparse_width(self) -> int:
        return self.tfidf.width if self.tfidf is not None else 0

    @property
    def collection_frequency(self) -> Optional[np.ndarray]:
        return self.tfidf.cf if self.tfidf is not None else None

    @property
    def dense_width(self) -> int:
        return int(self.embedding["dimension"]) if self.embedding else 0

    @property
    def width(self) -> int:
        return self.sparse_width + self.dense_width

    @staticmethod
    def fit(train_docs: Sequence[TokenizedDocument], pre: PreprocessConfig, feat: FeatureConfig,
            table: Optional[EmbeddingTable] = None) -> "FeaturePipeline":
        tfidf = None
        if feat.kind.uses_tfidf:
            tfidf = fit_tfidf(train_docs, feat.analyzer, feat.ngram_range, feat.min_df)
        if feat.kind.uses_embeddings and table is None:
            table = _load_table(feat)
        if not feat.kind.uses_embeddings:
            table = None
        return FeaturePipeline(
            preprocess=pre,
            features=feat,
            tfidf=tfidf,
            embedding=table.identity() if table is not None else None,
            table=table,
        )

    def transform(self, docs: Sequence[TokenizedDocument]) -> sp.csr_matrix:
        sparse = transform_matrix(self.tfidf, docs) if self.tfidf is not None else None
        dense = None
        if self.features.kind.uses_embeddings:
            if self.table is None:
                raise EmbeddingError("pipeline needs its embedding table; load it with from_dict(..., table)")
            dense = embed_documents(self.table, [d.tokens for d in docs])
        return stack_blocks(sparse, dense)

    def transform_texts(self, texts: Sequence[str]) -> sp.csr_matrix:
        return self.transform([preprocess(t, self.preprocess) for t in texts])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "preprocess": self.preprocess.to_dict(),
            "features": self.features.to_dict(),
            "tfidf": self.tfidf.to_dict() if self.tfidf is not None else None,
            "embedding": self.embedding,
        }

    def fingerprint(self) -> str:
        return fingerprint(self.to_dict())

    @staticmethod
    def from_dict(d: Dict[str, Any], embedding_path: Optional[str] = None,
                  table: Optional[EmbeddingTable] = None) -> "FeaturePipeline":
        feat = FeatureConfig.from_dict(d["features"], embedding_path=embedding_path)
        expected = d.get("embedding")
        if feat.kind.uses_embeddings:
            if table is None:
                table = _load_table(feat)
            if table.identity() != expected:
                raise FingerprintError(
                    f"embedding table {table.identity()} does not match the one the model was trained with {expected}"
                )
        else:
            table = None
        return FeaturePipeline(
            preprocess=PreprocessConfig.from_dict(d["preprocess"]),
            features=feat,
            tfidf=TfidfModel.from_dict(d["tfidf"]) if d.get("tfidf") else None,
            embedding=expected,
            table=table,
        )


def _load_table(feat: FeatureConfig) -> EmbeddingTable:
    if not feat.embedding_path:
        raise ConfigError(f"feature kind '{feat.kind.value}' needs an embedding file (--embeddings)")
    return load_embeddings(feat.embedding_path)
