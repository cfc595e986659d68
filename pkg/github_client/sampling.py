# github_client/sampling.py
from __future__ import annotations
import logging
from typing import List, Sequence, TypeVar

from common.errors import ConfigError
from common.utils import rng

logger = logging.getLogger(__name__)

T = TypeVar("T")


def sample_random(items: Sequence[T], n: int, seed: int) -> List[T]:
    """Seeded uniform sample without replacement, in population order."""
    if n < 0:
        raise ConfigError(f"sample size must be >= 0, got {n}")
    if n >= len(items):
        return list(items)
    picked = sorted(rng(seed).choice(len(items), size=n, replace=False).tolist())
    return [items[i] for i in picked]
