# bench/grid.py
from __future__ import annotations
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from common import config
from common.errors import ConfigError, DataError, FingerprintError
from common.utils import derive_seed
from corpus.dataset import Dataset
from corpus.document import Source
from corpus.split import SplitSpec, partition_fingerprint, split
from features.embeddings import EmbeddingTable, load_embeddings
from features.pipeline import FEATURE_LABELS, FeatureConfig, FeatureKind, FeaturePipeline
from metrics.report import EvalReport, evaluate
from multilabel.base import BaseConfig, BaseKind
from multilabel.strategies import ChainConfig, Strategy, train_chain, train_ovr
from textprep.pipeline import PreprocessConfig, TokenizedDocument, preprocess_dataset

logger = logging.getLogger(__name__)

Variant = Tuple[str, Tuple[int, int]]

DEFAULT_VARIANT: Variant = (config.TFIDF_ANALYZER, tuple(config.TFIDF_NGRAM))
SWEEP_VARIANTS: Tuple[Variant, ...] = tuple(("word", tuple(r)) for r in config.WORD_NGRAM_SWEEP) + (DEFAULT_VARIANT,)


def dataset_label(dataset: Dataset) -> str:
    """AppReviews / IssueComments when single-source, Combined otherwise."""
    sources = {d.source for d in dataset.documents}
    if sources == {Source.APP_REVIEW}:
        return "AppReviews"
    if sources == {Source.ISSUE_COMMENT}:
        return "IssueComments"
    return "Combined"


def format_ngram(ngram: Optional[Tuple[int, int]]) -> str:
    return f"{ngram[0]},{ngram[1]}" if ngram else ""


def config_key(dataset: str, strategy: Strategy, feature: FeatureKind,
               variant: Optional[Variant], model: BaseKind) -> str:
    analyzer, ngram = variant if variant else ("", None)
    return "|".join([dataset, strategy.label, FEATURE_LABELS[feature], analyzer, format_ngram(ngram), model.label])


@dataclass(frozen=True)
class GridSpec:
    datasets: Tuple[str, ...] = config.BENCH_DATASETS
    strategies: Tuple[Strategy, ...] = (Strategy.OVR, Strategy.CC)
    features: Tuple[FeatureKind, ...] = (FeatureKind.TFIDF, FeatureKind.EMBEDDING, FeatureKind.STACKED)
    models: Tuple[BaseKind, ...] = (BaseKind.LR, BaseKind.SVM, BaseKind.RF, BaseKind.GBT)
    variants: Tuple[Variant, ...] = (DEFAULT_VARIANT,)
    seed: int = config.SPLIT_SEED
    train_fraction: float = config.TRAIN_FRACTION
    stratify: bool = config.STRATIFY
    preprocess: PreprocessConfig = PreprocessConfig()
    base: BaseConfig = BaseConfig()
    chain: ChainConfig = ChainConfig()
    n_jobs: int = 1
    timing: bool = False

    def __post_init__(self):
        for name in ("datasets", "strategies", "features", "models", "variants"):
            if not getattr(self, name):
                raise ConfigError(f"grid selection '{name}' is empty")
        unknown = [d for d in self.datasets if d not in config.BENCH_DATASETS]
        if unknown:
            raise ConfigError(f"unknown dataset names {unknown}; expected {config.BENCH_DATASETS}")
        for analyzer, (lo, hi) in self.variants:
            FeatureConfig(analyzer=analyzer, ngram_range=(lo, hi))

    @property
    def split_spec(self) -> SplitSpec:
        return SplitSpec(train_fraction=self.train_fraction, seed=self.seed, stratify=self.stratify)

    def configurations(self, dataset: str) -> List[Tuple[Strategy, FeatureKind, Optional[Variant], BaseKind]]:
        out = []
        for strategy in self.strategies:
            for feature in self.features:
                variants = self.variants if feature.uses_tfidf else (None,)
                for variant in variants:
                    for model in self.models:
                        out.append((strategy, feature, variant, model))
        return out


@dataclass(frozen=True)
class GridRow:
    dataset: str
    strategy: Strategy
    feature: FeatureKind
    analyzer: str
    ngram: str
    model: BaseKind
    report: EvalReport
    seconds: float
    key: str
    seed: int
    test_fingerprint: str

    def as_row(self, timing: bool = False, decimals: int = config.REPORT_DECIMALS) -> Dict[str, str]:
        row = {
            "dataset": self.dataset,
            "strategy": self.strategy.label,
            "feature": FEATURE_LABELS[self.feature],
            "analyzer": self.analyzer,
            "ngram": self.ngram,
            "model": self.model.label,
        }
        row.update(self.report.metric_row(decimals))
        row["seconds"] = f"{self.seconds:.2f}" if timing else ""
        return row


@dataclass
class ResultsTable:
    rows: List[GridRow] = field(default_factory=list)
    timing: bool = False

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def find(self, dataset: str, strategy: str, feature: str, model: str,
             analyzer: str = "", ngram: str = "") -> List[GridRow]:
        out = []
        for r in self.rows:
            if (r.dataset, r.strategy.label, FEATURE_LABELS[r.feature], r.model.label) != (dataset, strategy, feature, model):
                continue
            if analyzer and r.analyzer != analyzer:
                continue
            if ngram and r.ngram != ngram:
                continue
            out.append(r)
        return out


# ------------------------------
# Runner
# ------------------------------

@dataclass(frozen=True, eq=False)
class _Prepared:
    """One dataset split and its feature matrices, shared by every configuration."""
    name: str
    Y_train: np.ndarray
    Y_test: np.ndarray
    test_fingerprint: str
    matrices: Dict[Tuple[FeatureKind, Optional[Variant]], Tuple[Any, Any, int, Any, str]]


def _prepare(name: str, dataset: Dataset, spec: GridSpec, table: Optional[EmbeddingTable],
             embedding_path: Optional[str]) -> _Prepared:
    train, test = split(dataset, spec.split_spec)
    tokens: Dict[str, TokenizedDocument] = {
        t.doc_id: t for t in preprocess_dataset(dataset, spec.preprocess, n_jobs=spec.n_jobs)
    }
    train_docs = [tokens[i] for i in train.ids]
    test_docs = [tokens[i] for i in test.ids]

    matrices = {}
    for feature in spec.features:
        for variant in (spec.variants if feature.uses_tfidf else (None,)):
            analyzer, ngram = variant if variant else DEFAULT_VARIANT
            fcfg = FeatureConfig(kind=feature, analyzer=analyzer, ngram_range=ngram, embedding_path=embedding_path)
            pipe = FeaturePipeline.fit(train_docs, spec.preprocess, fcfg, table=table)
            matrices[(feature, variant)] = (pipe.transform(train_docs), pipe.transform(test_docs),
                                            pipe.sparse_width, pipe.collection_frequency, pipe.fingerprint())
    logger.info("[%s] split %d/%d, %d feature set(s)", name, len(train), len(test), len(matrices))
    return _Prepared(name, train.label_matrix(), test.label_matrix(), partition_fingerprint(test), matrices)


def _run_one(prep: _Prepared, spec: GridSpec, strategy: Strategy, feature: FeatureKind,
             variant: Optional[Variant], model: BaseKind) -> GridRow:
    key = config_key(prep.name, strategy, feature, variant, model)
    seed = derive_seed(spec.seed, key)
    X_train, X_test, sparse_width, cf, fp = prep.matrices[(feature, variant)]
    base = BaseConfig(kind=model, linear=spec.base.linear, forest=spec.base.forest,
                      boost=spec.base.boost, top_k=spec.base.top_k)

    t0 = time.perf_counter()
    if strategy is Strategy.OVR:
        mlm = train_ovr(X_train, prep.Y_train, base, seed=seed, sparse_width=sparse_width, cf=cf)
    else:
        mlm = train_chain(X_train, prep.Y_train, base, seed=seed, chain=spec.chain, sparse_width=sparse_width,
                          cf=cf)
    report = evaluate(mlm, X_test, prep.Y_test, fingerprint=fp, seed=seed)
    seconds = time.perf_counter() - t0

    analyzer, ngram = variant if variant else ("", None)
    return GridRow(
        dataset=prep.name, strategy=strategy, feature=feature, analyzer=analyzer,
        ngram=format_ngram(ngram), model=model, report=report, seconds=seconds,
        key=key, seed=seed, test_fingerprint=prep.test_fingerprint,
    )


def run_grid(spec: GridSpec, datasets: Mapping[str, Dataset],
             embedding_path: Optional[str] = None) -> ResultsTable:
    """
    One row per configuration. Each dataset is split once and every row of
    that dataset evaluates on the same test partition.
    """
    missing = [d for d in spec.datasets if d not in datasets]
    if missing:
        raise DataError(f"no documents for dataset(s) {missing}")

    table = None
    if any(f.uses_embeddings for f in spec.features):
        if not embedding_path:
            raise ConfigError("Word2vec/Stacked features need an embedding file (--embeddings)")
        table = load_embeddings(embedding_path)

    rows: List[GridRow] = []
    for name in spec.datasets:
        prep = _prepare(name, datasets[name], spec, table, embedding_path)
        todo = spec.configurations(name)
        if spec.n_jobs == 1:
            done = [_run_one(prep, spec, *c) for c in todo]
        else:
            done = Parallel(n_jobs=spec.n_jobs)(delayed(_run_one)(prep, spec, *c) for c in todo)
        for row in done:
            if row.test_fingerprint != prep.test_fingerprint:
                raise FingerprintError(f"{row.key}: evaluated on a different test partition")
            logger.info("[%s] %s (%.1fs)", row.key, row.report.summary(), row.seconds)
        rows.extend(done)

    return ResultsTable(rows=rows, timing=spec.timing)
