# common/paths.py
from __future__ import annotations
from dataclasses import dataclass
from pathlib import Path

from common import config


def project_root() -> Path:
    """Resolve repo root: <root>/common/paths.py -> parents[1] is <root>."""
    return Path(__file__).resolve().parents[1]


@dataclass(frozen=True)
class Paths:
    """
    Filesystem layout helper.
    Bundled resources live under <repo>/data.
    """
    data_dir: Path

    @staticmethod
    def default() -> "Paths":
        return Paths(data_dir=project_root() / "data")

    def reference_table(self) -> Path:
        return self.data_dir / config.REFERENCE_FILE
