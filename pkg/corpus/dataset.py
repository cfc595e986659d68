# corpus/dataset.py
from __future__ import annotations
import csv
import json
import logging
import os
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from common import config
from common.errors import DatasetError
from common.logger import CSVLogger
from common.utils import atomic_write
from corpus.document import (
    Document, LabelVector, Source, format_subcategories, parse_subcategories,
)
from corpus.projects import project_by_name

logger = logging.getLogger(__name__)


class DataFormat(str, Enum):
    CSV = "csv"
    JSONL = "jsonl"

    @staticmethod
    def infer(path: str, fmt: Optional[str] = None) -> "DataFormat":
        if fmt:
            return DataFormat(fmt.lower())
        ext = os.path.splitext(str(path))[1].lower()
        if ext in (".jsonl", ".ndjson", ".json"):
            return DataFormat.JSONL
        return DataFormat.CSV


@dataclass(frozen=True)
class Dataset:
    documents: Tuple[Document, ...]
    name: str = ""

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    @property
    def ids(self) -> List[str]:
        return [d.id for d in self.documents]

    def label_matrix(self) -> np.ndarray:
        """N x 4 int8 matrix of gold bits in column order."""
        if not self.documents:
            return np.zeros((0, config.N_LABELS), dtype=np.int8)
        return np.array([d.labels.bits() for d in self.documents], dtype=np.int8)


# ------------------------------
# Validation
# ------------------------------

@dataclass(frozen=True)
class ValidationEntry:
    level: str        # ERROR / WARN / INFO
    code: str
    doc_id: str
    msg: str


@dataclass
class ValidationReport:
    entries: List[ValidationEntry] = field(default_factory=list)

    def add(self, level: str, code: str, doc_id: str, msg: str) -> None:
        self.entries.append(ValidationEntry(level, code, doc_id, msg))

    @property
    def errors(self) -> List[ValidationEntry]:
        return [e for e in self.entries if e.level == "ERROR"]

    @property
    def is_valid(self) -> bool:
        return not self.errors

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def validate(dataset: Dataset, check_projects: bool = False) -> ValidationReport:
    """
    Every invariant violation, one entry each. Never raises.
    Duplicates: one entry per repeated occurrence after the first.
    """
    report = ValidationReport()
    seen: Counter = Counter()

    for d in dataset.documents:
        if not d.id or not d.id.strip():
            report.add("ERROR", "EMPTY_ID", d.id, "id is empty")
        else:
            seen[d.id] += 1
            if seen[d.id] > 1:
                report.add("ERROR", "DUPLICATE_ID", d.id, f"id repeated (occurrence {seen[d.id]})")

        if not d.text or not d.text.strip():
            report.add("ERROR", "EMPTY_TEXT", d.id, "text is empty after trimming")

        if not d.labels.is_consistent:
            report.add("ERROR", "LABEL_CONSISTENCY", d.id,
                       f"non_human_centric={d.labels.non_human_centric} with labels {d.labels.bits()}")

        for sub in sorted(d.subcategories or (), key=lambda s: s.value):
            if not d.labels.has(sub.parent):
                report.add("WARN", "SUBCATEGORY_PARENT", d.id,
                           f"{sub.value} set but parent {sub.parent.value}=0")

        if check_projects and project_by_name(d.project) is None:
            report.add("INFO", "UNKNOWN_PROJECT", d.id, f"project '{d.project}' not in registry")

    return report


# ------------------------------
# Parsing
# ------------------------------

def _parse_source(raw: Any) -> Source:
    s = str(raw or "").strip().lower().replace("-", "_")
    aliases = {"appreview": "app_review", "issuecomment": "issue_comment"}
    s = aliases.get(s, s)
    try:
        return Source(s)
    except ValueError:
        raise ValueError(f"unknown source '{raw}'") from None


def _parse_bit(name: str, raw: Any) -> int:
    s = str(raw).strip() if raw is not None else ""
    if s in ("0", "1"):
        return int(s)
    if isinstance(raw, bool):
        return int(raw)
    raise ValueError(f"label {name} must be 0 or 1, got '{s}'")


def _row_to_document(row: Dict[str, Any]) -> Document:
    missing = [c for c in config.CSV_COLUMNS[:-1] if c not in row]
    if missing:
        raise ValueError(f"missing fields: {', '.join(missing)}")

    doc_id = str(row["id"] if row["id"] is not None else "").strip()
    if not doc_id:
        raise ValueError("empty id")

    text = row["text"] if row["text"] is not None else ""
    if not str(text).strip():
        raise ValueError("empty text")

    labels = LabelVector(*(_parse_bit(c, row[c]) for c in config.LABEL_COLUMNS))
    if not labels.is_consistent:
        raise ValueError(f"label consistency: {labels.bits()}")

    subs_raw = row.get("subcategories")
    if isinstance(subs_raw, list):
        subs_raw = config.SUBCATEGORY_SEP.join(str(s) for s in subs_raw)
    try:
        subs = parse_subcategories(subs_raw or "")
    except ValueError as e:
        raise ValueError(f"unknown subcategory: {e}") from None

    return Document(
        id=doc_id,
        source=_parse_source(row["source"]),
        project=str(row["project"] or "").strip(),
        text=str(text),
        labels=labels,
        subcategories=subs,
    )


def _decoded_lines(f, path: str) -> Iterator[str]:
    for lineno, raw in enumerate(f, start=1):
        try:
            yield raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise DatasetError(f"invalid UTF-8 at byte {e.start}", line=lineno, path=path) from None


def _iter_csv(path: str, required: Sequence[str]) -> Iterator[Tuple[int, Dict[str, Any]]]:
    with open(path, "rb") as f:
        reader = csv.DictReader(_decoded_lines(f, path))
        if reader.fieldnames is None:
            return
        fields = [h.strip() for h in reader.fieldnames]
        reader.fieldnames = fields
        missing = [c for c in required if c not in fields]
        if missing:
            raise DatasetError(f"header missing columns: {', '.join(missing)}", line=1, path=path)
        start = reader.line_num + 1
        for row in reader:
            yield start, row
            start = reader.line_num + 1


def _iter_jsonl(path: str) -> Iterator[Tuple[int, Dict[str, Any]]]:
    with open(path, "rb") as f:
        for lineno, line in enumerate(_decoded_lines(f, path), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise DatasetError(f"invalid JSON: {e.msg}", line=lineno, path=path) from None
            if not isinstance(obj, dict):
                raise DatasetError("expected a JSON object", line=lineno, path=path)
            yield lineno, obj


def iter_rows(path: str, fmt: Optional[str] = None,
              required: Sequence[str] = tuple(config.CSV_COLUMNS[:-1])) -> Iterator[Tuple[int, Dict[str, Any]]]:
    """Rows with the line each starts on. CSV headers must carry `required`."""
    if DataFormat.infer(path, fmt) is DataFormat.JSONL:
        return _iter_jsonl(path)
    return _iter_csv(path, required)


def load_dataset(path: str, fmt: Optional[str] = None, name: str = "") -> Dataset:
    """
    Parse and validate a corpus file. All-or-nothing: the first bad row aborts
    the load with its line number.
    """
    path = str(path)
    docs: List[Document] = []
    first_line: Dict[str, int] = {}

    for lineno, row in iter_rows(path, fmt):
        try:
            doc = _row_to_document(row)
        except ValueError as e:
            raise DatasetError(str(e), line=lineno, path=path) from None
        if doc.id in first_line:
            raise DatasetError(f"duplicate id '{doc.id}' (first seen on line {first_line[doc.id]})",
                               line=lineno, path=path)
        first_line[doc.id] = lineno
        docs.append(doc)

    if not docs:
        raise DatasetError("no documents", path=path)

    ds = Dataset(documents=tuple(docs), name=name or os.path.splitext(os.path.basename(path))[0])
    logger.info("loaded %d documents from %s", len(ds), path)
    return ds


def load_texts(path: str, fmt: Optional[str] = None) -> List[Tuple[str, str]]:
    """
    (id, text) pairs for prediction input; labels are not required.
    An empty file yields an empty list.
    """
    out = []
    for lineno, row in iter_rows(path, fmt, required=("id", "text")):
        doc_id = str(row.get("id") or "").strip()
        if not doc_id:
            raise DatasetError("empty id", line=lineno, path=str(path))
        out.append((doc_id, str(row.get("text") or "")))
    return out


# ------------------------------
# Writing / combining
# ------------------------------

def _document_row(d: Document) -> Dict[str, Any]:
    row: Dict[str, Any] = {
        "id": d.id,
        "source": d.source.value,
        "project": d.project,
        "text": d.text,
    }
    for c, b in zip(config.LABEL_COLUMNS, d.labels.bits()):
        row[c] = b
    row["subcategories"] = format_subcategories(d.subcategories)
    return row


def write_dataset(dataset: Dataset, path: str, fmt: Optional[str] = None) -> None:
    if DataFormat.infer(path, fmt) is DataFormat.JSONL:
        with atomic_write(path) as f:
            for d in dataset.documents:
                f.write(json.dumps(_document_row(d), ensure_ascii=False) + "\n")
        return
    with CSVLogger(str(path), config.CSV_COLUMNS) as out:
        out.write_all(_document_row(d) for d in dataset.documents)


def concat(datasets: Sequence[Dataset], name: str = "Combined") -> Dataset:
    docs: List[Document] = []
    seen = set()
    for ds in datasets:
        for d in ds.documents:
            if d.id in seen:
                raise DatasetError(f"duplicate id '{d.id}' across datasets ({ds.name})")
            seen.add(d.id)
            docs.append(d)
    return Dataset(documents=tuple(docs), name=name)


def filter_source(dataset: Dataset, source: Source, name: str = "") -> Dataset:
    docs = tuple(d for d in dataset.documents if d.source is source)
    return Dataset(documents=docs, name=name or dataset.name)


def subset(dataset: Dataset, indices: Iterable[int], name: str) -> Dataset:
    return Dataset(documents=tuple(dataset.documents[i] for i in indices), name=name)
