# features/tfidf.py
"""
Smoothed TF-IDF over word or character n-grams.

    idf(t) = ln((1 + N) / (1 + df(t))) + 1
    x(t)   = count(t) * idf(t), then the row is L2-normalised

Counting is delegated to sklearn's CountVectorizer over precomputed term lists,
so the analyzer (and therefore preprocessing) stays under our control.
"""
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from sklearn.feature_extraction.text import CountVectorizer
from sklearn.preprocessing import normalize

from common.errors import DataError
from features.ngrams import char_ngrams, word_ngrams
from textprep.pipeline import TokenizedDocument

logger = logging.getLogger(__name__)

ANALYZERS = ("word", "char")


def _identity(terms):
    return terms


def document_terms(doc: TokenizedDocument, analyzer: str, ngram_range: Tuple[int, int]) -> List[str]:
    if analyzer == "char":
        return char_ngrams(doc.normalized_text, ngram_range)
    if analyzer == "word":
        return word_ngrams(doc.tokens, ngram_range)
    raise ValueError(f"unknown analyzer '{analyzer}'")


@dataclass(frozen=True, eq=False)
class TfidfModel:
    analyzer: str
    ngram_range: Tuple[int, int]
    vocabulary: Dict[str, int]
    idf: np.ndarray = field(repr=False)
    n_docs: int
    df: np.ndarray = field(repr=False)
    cf: np.ndarray = field(repr=False)      # collection frequency per column
    min_df: int = 1

    @property
    def width(self) -> int:
        return len(self.vocabulary)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "analyzer": self.analyzer,
            "ngram_range": list(self.ngram_range),
            "vocabulary": dict(self.vocabulary),
            "idf": self.idf.tolist(),
            "N": self.n_docs,
            "df": self.df.tolist(),
            "cf": self.cf.tolist(),
            "min_df": self.min_df,
        }

    @staticmethod
    def from_dict(d: Dict[str, Any]) -> "TfidfModel":
        return TfidfModel(
            analyzer=d["analyzer"],
            ngram_range=(int(d["ngram_range"][0]), int(d["ngram_range"][1])),
            vocabulary={str(k): int(v) for k, v in d["vocabulary"].items()},
            idf=np.asarray(d["idf"], dtype=np.float64),
            n_docs=int(d["N"]),
            df=np.asarray(d["df"], dtype=np.int64),
            cf=np.asarray(d.get("cf", d["df"]), dtype=np.int64),
            min_df=int(d.get("min_df", 1)),
        )


def fit_tfidf(train_docs: Sequence[TokenizedDocument], analyzer: str = "char",
              ngram_range: Tuple[int, int] = (4, 4), min_df: int = 1) -> TfidfModel:
    """Vocabulary is every training term (sorted); df counts documents, not occurrences."""
    if analyzer not in ANALYZERS:
        raise ValueError(f"unknown analyzer '{analyzer}'")
    terms = [document_terms(d, analyzer, ngram_range) for d in train_docs]
    if not any(terms):
        raise DataError("empty corpus: no terms in any training document")

    cv = CountVectorizer(analyzer=_identity, min_df=min_df, lowercase=False)
    try:
        counts = cv.fit_transform(terms).tocsc()
    except ValueError as e:
        # min_df pruned everything
        raise DataError(f"empty vocabulary: {e}") from None

    n = len(train_docs)
    df = np.diff(counts.indptr).astype(np.int64)
    cf = np.asarray(counts.sum(axis=0)).ravel().astype(np.int64)
    idf = np.log((1.0 + n) / (1.0 + df)) + 1.0

    model = TfidfModel(
        analyzer=analyzer,
        ngram_range=(int(ngram_range[0]), int(ngram_range[1])),
        vocabulary={t: int(i) for t, i in sorted(cv.vocabulary_.items(), key=lambda kv: kv[1])},
        idf=idf,
        n_docs=n,
        df=df,
        cf=cf,
        min_df=min_df,
    )
    logger.debug("tfidf %s%s: %d docs, %d terms", analyzer, model.ngram_range, n, model.width)
    return model


def transform_matrix(model: TfidfModel, docs: Sequence[TokenizedDocument]) -> sp.csr_matrix:
    """N x V CSR block; unseen terms ignored; rows without known terms stay zero."""
    terms = [document_terms(d, model.analyzer, model.ngram_range) for d in docs]
    if not model.vocabulary or not docs:
        return sp.csr_matrix((len(docs), model.width), dtype=np.float64)
    cv = CountVectorizer(analyzer=_identity, vocabulary=model.vocabulary, lowercase=False)
    counts = cv.transform(terms).astype(np.float64)
    weighted = counts @ sp.diags(model.idf, format="csr")
    out = normalize(weighted, norm="l2", axis=1).tocsr()
    out.sort_indices()
    return out


def transform_tfidf(model: TfidfModel, doc: TokenizedDocument) -> sp.csr_matrix:
    """Single-document 1 x V row."""
    return transform_matrix(model, [doc])
