# features/stack.py
from __future__ import annotations
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from sklearn.preprocessing import normalize

from common.errors import ShapeError


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Sparse block (indices strictly increasing) followed by an optional dense block."""
    indices: Tuple[int, ...]
    values: Tuple[float, ...]
    sparse_width: int
    dense: Optional[np.ndarray] = None

    @property
    def total_width(self) -> int:
        return self.sparse_width + (0 if self.dense is None else len(self.dense))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.total_width, dtype=np.float64)
        out[list(self.indices)] = self.values
        if self.dense is not None:
            out[self.sparse_width:] = self.dense
        return out

    def to_csr(self) -> sp.csr_matrix:
        cols = list(self.indices)
        vals = list(self.values)
        if self.dense is not None:
            nz = np.flatnonzero(self.dense)
            cols += [self.sparse_width + int(j) for j in nz]
            vals += [float(self.dense[j]) for j in nz]
        return sp.csr_matrix((vals, (np.zeros(len(cols), dtype=np.int64), cols)),
                             shape=(1, self.total_width), dtype=np.float64)


def l2_rows(dense: np.ndarray) -> np.ndarray:
    """Row-wise L2 normalisation; zero rows stay zero."""
    dense = np.atleast_2d(np.asarray(dense, dtype=np.float64))
    if dense.shape[0] == 0 or dense.shape[1] == 0:
        return dense
    return normalize(dense, norm="l2", axis=1)


def stack(sparse_row: Optional[sp.spmatrix], dense: Optional[np.ndarray], sparse_width: int = 0) -> FeatureVector:
    """
    Concatenate one document's blocks: sparse first, dense after the sparse width.
    The dense block is L2-normalised here; the TF-IDF block already is.
    """
    if sparse_row is not None:
        row = sp.csr_matrix(sparse_row)
        if row.shape[0] != 1:
            raise ShapeError(f"expected a single sparse row, got {row.shape[0]}")
        row.sort_indices()
        indices = tuple(int(j) for j in row.indices)
        values = tuple(float(v) for v in row.data)
        sparse_width = row.shape[1]
    else:
        indices, values = (), ()
    dense_block = None if dense is None else l2_rows(dense)[0]
    return FeatureVector(indices=indices, values=values, sparse_width=sparse_width, dense=dense_block)


def stack_blocks(sparse: Optional[sp.spmatrix], dense: Optional[np.ndarray]) -> sp.csr_matrix:
    """Batch form of `stack` over N rows."""
    if sparse is None and dense is None:
        raise ShapeError("nothing to stack")
    if dense is None:
        return sp.csr_matrix(sparse, dtype=np.float64)
    dense_csr = sp.csr_matrix(l2_rows(dense))
    if sparse is None:
        return dense_csr
    if sparse.shape[0] != dense_csr.shape[0]:
        raise ShapeError(f"row count mismatch: sparse {sparse.shape[0]} vs dense {dense_csr.shape[0]}")
    return sp.hstack([sparse, dense_csr], format="csr", dtype=np.float64)


def to_matrix(vectors: Sequence[FeatureVector]) -> sp.csr_matrix:
    if not vectors:
        return sp.csr_matrix((0, 0), dtype=np.float64)
    width = vectors[0].total_width
    for i, v in enumerate(vectors):
        if v.total_width != width:
            raise ShapeError(f"vector {i} has width {v.total_width}, expected {width}")
    return sp.vstack([v.to_csr() for v in vectors], format="csr")
