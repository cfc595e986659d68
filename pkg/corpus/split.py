# corpus/split.py
from __future__ import annotations
import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

from common import config
from common.errors import ConfigError, DatasetError
from common.utils import fingerprint, rng
from corpus.dataset import Dataset, subset


@dataclass(frozen=True)
class SplitSpec:
    """
    Seeded train/test cut. Shuffle is numpy PCG64(seed).permutation, then the
    first round(train_fraction * N) positions go to train (round half up).
    """
    train_fraction: float = config.TRAIN_FRACTION
    seed: int = config.SPLIT_SEED
    stratify: bool = config.STRATIFY

    def __post_init__(self):
        if not (0.0 < self.train_fraction < 1.0):
            raise ConfigError(f"train_fraction must be in (0,1), got {self.train_fraction}")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


def train_size(n: int, fraction: float) -> int:
    return int(math.floor(fraction * n + 0.5))


def _stratified_order(dataset: Dataset, spec: SplitSpec) -> Tuple[List[int], List[int]]:
    groups: Dict[Tuple[int, ...], List[int]] = {}
    for i, d in enumerate(dataset.documents):
        groups.setdefault(d.labels.bits(), []).append(i)

    g = rng(spec.seed)
    keys = sorted(groups)
    shuffled = {k: [groups[k][j] for j in g.permutation(len(groups[k]))] for k in keys}

    target = train_size(len(dataset), spec.train_fraction)
    exact = {k: spec.train_fraction * len(groups[k]) for k in keys}
    quota = {k: int(math.floor(exact[k])) for k in keys}
    # hand out the remainder by largest fractional part, stratum key order on ties
    remainder = target - sum(quota.values())
    for k in sorted(keys, key=lambda k: (-(exact[k] - quota[k]), k))[:max(0, remainder)]:
        quota[k] += 1

    train, test = [], []
    for k in keys:
        train.extend(shuffled[k][:quota[k]])
        test.extend(shuffled[k][quota[k]:])
    return train, test


def split(dataset: Dataset, spec: SplitSpec) -> Tuple[Dataset, Dataset]:
    """Partition into (train, test); identical output for identical (dataset, spec)."""
    n = len(dataset)
    if n == 0:
        raise DatasetError("cannot split an empty dataset")

    if spec.stratify:
        train_idx, test_idx = _stratified_order(dataset, spec)
    else:
        perm = rng(spec.seed).permutation(n)
        cut = train_size(n, spec.train_fraction)
        train_idx, test_idx = list(perm[:cut]), list(perm[cut:])

    base = dataset.name or "dataset"
    return subset(dataset, train_idx, f"{base}-train"), subset(dataset, test_idx, f"{base}-test")


def partition_fingerprint(part: Dataset) -> str:
    """Order-free identity of a partition (sorted ids)."""
    return fingerprint(sorted(part.ids))
