# trees/projection.py
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
import scipy.sparse as sp

from common import config
from common.errors import ShapeError


@dataclass(frozen=True, eq=False)
class DenseProjection:
    """
    Column selector feeding the tree learners: the top_k sparse columns by
    training collection frequency (ties to the lower index), plus every column
    at or beyond `sparse_width` (embedding block, chain augmentation) that is
    not identically zero in training.
    """
    columns: np.ndarray = field(repr=False)
    input_width: int
    sparse_width: int
    top_k: int = config.TREE_TOP_K

    @property
    def width(self) -> int:
        return len(self.columns)

    @staticmethod
    def fit(X, sparse_width: Optional[int] = None, top_k: int = config.TREE_TOP_K,
            cf: Optional[np.ndarray] = None) -> "DenseProjection":
        """
        `cf` is the term collection frequency of the sparse block. Without it
        the column sums of X are used, which is cf when X holds raw counts.
        """
        X = sp.csc_matrix(X, copy=True)
        X.eliminate_zeros()
        n_cols = X.shape[1]
        sw = n_cols if sparse_width is None else min(int(sparse_width), n_cols)
        if cf is None:
            rank = np.asarray(X[:, :sw].sum(axis=0)).ravel()
        else:
            rank = np.asarray(cf, dtype=np.float64).ravel()
            if rank.shape[0] != sw:
                raise ShapeError(f"cf has {rank.shape[0]} entries for a sparse block of width {sw}")
        idx = np.arange(sw)
        ranked = np.lexsort((idx, -rank))[:max(0, top_k)]
        nnz = np.diff(X.indptr)
        cols = np.concatenate([np.sort(ranked), sw + np.flatnonzero(nnz[sw:])]).astype(np.int64)
        return DenseProjection(columns=cols, input_width=n_cols, sparse_width=sw, top_k=top_k)

    def transform(self, X) -> np.ndarray:
        if X.shape[1] != self.input_width:
            raise ShapeError(f"feature width {X.shape[1]} != projection input width {self.input_width}")
        if sp.issparse(X):
            return sp.csr_matrix(X)[:, self.columns].toarray()
        return np.asarray(X, dtype=np.float64)[:, self.columns]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "columns": self.columns.tolist(),
            "input_width": self.input_width,
            "sparse_width": self.sparse_width,
            "top_k": self.top_k,
        }

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "DenseProjection":
        return DenseProjection(
            columns=np.asarray(d["columns"], dtype=np.int64),
            input_width=int(d["input_width"]),
            sparse_width=int(d["sparse_width"]),
            top_k=int(d.get("top_k", config.TREE_TOP_K)),
        )
