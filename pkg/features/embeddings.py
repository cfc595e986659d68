# features/embeddings.py
from __future__ import annotations
import hashlib
import logging
import os
from dataclasses import dataclass, field
from typing import Dict, Sequence

import numpy as np

from common.errors import EmbeddingError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    dimension: int
    vectors: Dict[str, np.ndarray] = field(repr=False)
    source_name: str = ""
    digest: str = ""          # sha256 of the file bytes

    def __len__(self) -> int:
        return len(self.vectors)

    def identity(self) -> Dict[str, object]:
        return {
            "source_name": self.source_name,
            "dimension": self.dimension,
            "size": len(self.vectors),
            "digest": self.digest,
        }


def _file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _decode(raw: bytes, path: str, lineno: int) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise EmbeddingError(f"{path}:{lineno}: invalid UTF-8 at byte {e.start}") from None


def load_embeddings(path: str) -> EmbeddingTable:
    """
    word2vec text format: header "count dim", then "token v1 ... vd" per line.
    A repeated token keeps its last vector.
    """
    path = str(path)
    if not os.path.exists(path):
        raise EmbeddingError(f"embedding file not found: {path}")

    vectors: Dict[str, np.ndarray] = {}
    with open(path, "rb") as f:
        header = _decode(f.readline(), path, 1).split()
        try:
            declared, dim = int(header[0]), int(header[1])
        except (IndexError, ValueError):
            raise EmbeddingError(f"{path}:1: unreadable header, expected 'count dim'") from None
        if len(header) != 2 or dim < 1 or declared < 0:
            raise EmbeddingError(f"{path}:1: unreadable header, expected 'count dim'")

        for lineno, raw in enumerate(f, start=2):
            line = _decode(raw, path, lineno)
            parts = line.rstrip("\n").rstrip().split(" ")
            if not parts or parts == [""]:
                continue
            token, values = parts[0], parts[1:]
            if len(values) != dim:
                raise EmbeddingError(f"{path}:{lineno}: token '{token}' has {len(values)} values, expected {dim}")
            try:
                vec = np.asarray([float(v) for v in values], dtype=np.float64)
            except ValueError:
                raise EmbeddingError(f"{path}:{lineno}: non-numeric value for token '{token}'") from None
            if token in vectors:
                logger.warning("duplicate token '%s' on line %d; keeping the last vector", token, lineno)
            vectors[token] = vec

    if len(vectors) != declared:
        logger.warning("%s declares %d vectors, read %d", path, declared, len(vectors))
    logger.info("loaded %d embeddings (d=%d) from %s", len(vectors), dim, path)
    return EmbeddingTable(dimension=dim, vectors=vectors,
                          source_name=os.path.basename(path), digest=_file_digest(path))


def embed_document(table: EmbeddingTable, tokens: Sequence[str]) -> np.ndarray:
    """Mean of in-vocabulary token vectors; zeros when none are known."""
    hits = [table.vectors[t] for t in tokens if t in table.vectors]
    if not hits:
        return np.zeros(table.dimension, dtype=np.float64)
    return np.mean(np.vstack(hits), axis=0)


def embed_documents(table: EmbeddingTable, docs: Sequence[Sequence[str]]) -> np.ndarray:
    if not docs:
        return np.zeros((0, table.dimension), dtype=np.float64)
    return np.vstack([embed_document(table, toks) for toks in docs])
