# common/utils.py
import contextlib
import hashlib
import json
import os
import tempfile
from typing import Any, Iterator, TextIO

import numpy as np


def derive_seed(seed: int, key: str) -> int:
    """64-bit seed from (global seed, configuration key); order independent."""
    digest = hashlib.sha256(f"{int(seed)}:{key}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def rng(seed: int) -> np.random.Generator:
    """The one PRNG used across the package: PCG64."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def fingerprint(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


@contextlib.contextmanager
def atomic_write(path: str, encoding: str = "utf-8") -> Iterator[TextIO]:
    """Write to a temp sibling, then rename over `path`."""
    path = str(path)
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=parent)
    try:
        with os.fdopen(fd, "w", encoding=encoding, newline="") as f:
            yield f
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.remove(tmp)
        raise


def write_json(path: str, obj: Any) -> None:
    with atomic_write(path) as f:
        json.dump(obj, f, sort_keys=True)
        f.write("\n")


def read_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def format_pct(count: int, total: int) -> str:
    """25.5 / 47.25 style: at most two decimals, trailing zeros dropped."""
    if total <= 0:
        return "0"
    s = f"{100.0 * count / total:.2f}".rstrip("0").rstrip(".")
    return s or "0"
