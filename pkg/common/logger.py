# common/logger.py
import csv
import logging
import os
import sys
import tempfile
from typing import Any, Dict, Iterable

FORMAT = "[%(name)s][%(levelname)s] %(message)s"


def setup_logging(level: int = logging.INFO) -> None:
    """One stderr handler for the whole process; data never goes through logging."""
    root = logging.getLogger()
    for h in list(root.handlers):
        root.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(FORMAT))
    root.addHandler(handler)
    root.setLevel(level)


def ensure_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


class CSVLogger:
    """
    Row writer with a fixed header.
    Rows go to a temp file next to the target; close() renames it into place,
    so readers never see a half-written table.
    """

    def __init__(self, filepath: str, fieldnames: list[str]):
        self.filepath = str(filepath)
        self.fieldnames = fieldnames
        ensure_parent(self.filepath)

        fd, self._tmp = tempfile.mkstemp(
            prefix=".tmp-", suffix=".csv", dir=os.path.dirname(os.path.abspath(self.filepath))
        )
        self._file = os.fdopen(fd, "w", newline="", encoding="utf-8")
        self._writer = csv.DictWriter(self._file, fieldnames=fieldnames, lineterminator="\n")
        self._writer.writeheader()
        self.rows = 0

    def write(self, row: Dict[str, Any]) -> None:
        self._writer.writerow(row)
        self.rows += 1

    def write_all(self, rows: Iterable[Dict[str, Any]]) -> None:
        for row in rows:
            self.write(row)

    def close(self) -> None:
        if self._file.closed:
            return
        self._file.close()
        os.replace(self._tmp, self.filepath)

    def abort(self) -> None:
        if not self._file.closed:
            self._file.close()
        try:
            os.remove(self._tmp)
        except OSError:
            pass

    def __enter__(self) -> "CSVLogger":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        if exc_type is None:
            self.close()
        else:
            self.abort()
