# bench/reference.py
"""
Published reference numbers and the comparison against a results table.

Reference CSV columns:
  dataset,strategy,feature,analyzer,ngram,model,
  precision,recall,accuracy,f1,hamming_loss,
  tol_precision,tol_recall,tol_accuracy,tol_f1,tol_hamming_loss,
  status,source
status: reproduce | not_reproduced. Blank analyzer/ngram matches any variant;
a blank metric is not compared.
"""
from __future__ import annotations
import csv
import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Union

from common import config
from common.errors import DatasetError, ReferenceMismatchError
from bench.grid import GridRow, ResultsTable

logger = logging.getLogger(__name__)

METRICS = ("precision", "recall", "accuracy", "f1", "hamming_loss")
STATUS_REPRODUCE = "reproduce"
STATUS_NOT_REPRODUCED = "not_reproduced"

REFERENCE_COLUMNS = (
    ["dataset", "strategy", "feature", "analyzer", "ngram", "model"]
    + list(METRICS)
    + [f"tol_{m}" for m in METRICS]
    + ["status", "source"]
)


@dataclass(frozen=True)
class ReferenceRow:
    dataset: str
    strategy: str
    feature: str
    model: str
    analyzer: str = ""
    ngram: str = ""
    expected: Dict[str, float] = field(default_factory=dict)
    tolerance: Dict[str, float] = field(default_factory=dict)
    status: str = STATUS_REPRODUCE
    source: str = ""
    line: int = 0

    @property
    def key(self) -> str:
        return "|".join([self.dataset, self.strategy, self.feature, self.analyzer, self.ngram, self.model])


def _float(raw: Optional[str], what: str, line: int, path: str) -> Optional[float]:
    s = (raw or "").strip()
    if not s:
        return None
    try:
        return float(s)
    except ValueError:
        raise DatasetError(f"{what} is not a number: '{s}'", line=line, path=path) from None


def load_reference(path: str) -> List[ReferenceRow]:
    """An empty file, or a header with no rows, is an empty reference."""
    path = str(path)
    if os.path.getsize(path) == 0:
        return []
    rows: List[ReferenceRow] = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        missing = [c for c in ("dataset", "strategy", "feature", "model", "status") if c not in (reader.fieldnames or [])]
        if missing:
            raise DatasetError(f"reference header missing columns: {', '.join(missing)}", line=1, path=path)
        line = reader.line_num + 1
        for rec in reader:
            expected, tolerance = {}, {}
            for m in METRICS:
                v = _float(rec.get(m), m, line, path)
                if v is not None:
                    expected[m] = v
                    t = _float(rec.get(f"tol_{m}"), f"tol_{m}", line, path)
                    tolerance[m] = t if t is not None else 0.0
            status = (rec.get("status") or STATUS_REPRODUCE).strip()
            if status not in (STATUS_REPRODUCE, STATUS_NOT_REPRODUCED):
                raise DatasetError(f"unknown status '{status}'", line=line, path=path)
            rows.append(ReferenceRow(
                dataset=rec["dataset"].strip(),
                strategy=rec["strategy"].strip(),
                feature=rec["feature"].strip(),
                model=rec["model"].strip(),
                analyzer=(rec.get("analyzer") or "").strip(),
                ngram=(rec.get("ngram") or "").strip(),
                expected=expected,
                tolerance=tolerance,
                status=status,
                source=(rec.get("source") or "").strip(),
                line=line,
            ))
            line = reader.line_num + 1
    return rows


# ------------------------------
# Comparison
# ------------------------------

@dataclass(frozen=True)
class MetricCheck:
    metric: str
    expected: float
    actual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.actual - self.expected) <= self.tolerance + 1e-12


@dataclass(frozen=True)
class RowVerdict:
    reference: ReferenceRow
    row_key: str
    checks: List[MetricCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


@dataclass
class DiffReport:
    verdicts: List[RowVerdict] = field(default_factory=list)
    skipped: List[ReferenceRow] = field(default_factory=list)     # not_reproduced
    not_run: List[ReferenceRow] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for v in self.verdicts if v.passed)

    @property
    def failed(self) -> int:
        return len(self.verdicts) - self.passed

    def summary(self) -> Dict[str, int]:
        return {
            "compared": len(self.verdicts),
            "passed": self.passed,
            "failed": self.failed,
            "skipped": len(self.skipped),
            "not_run": len(self.not_run),
        }

    def render(self) -> List[str]:
        lines = []
        for v in self.verdicts:
            parts = " ".join(
                f"{c.metric}={c.actual:.4f}/{c.expected:.4f}±{c.tolerance:g}{'' if c.passed else '!'}"
                for c in v.checks
            )
            lines.append(f"[{'PASS' if v.passed else 'FAIL'}] {v.row_key} {parts}")
        for r in self.not_run:
            lines.append(f"[NOT_RUN] {r.key}")
        s = self.summary()
        lines.append(" ".join(f"{k}={v}" for k, v in s.items()))
        return lines


def _actual(row: GridRow, metric: str) -> float:
    rep = row.report
    return {
        "precision": rep.micro_precision,
        "recall": rep.micro_recall,
        "accuracy": rep.exact_match_accuracy,
        "f1": rep.micro_f1,
        "hamming_loss": rep.hamming_loss,
    }[metric]


def _check_key(ref: ReferenceRow) -> None:
    problems = []
    if ref.dataset not in config.BENCH_DATASETS:
        problems.append(f"dataset '{ref.dataset}'")
    if ref.strategy not in config.BENCH_STRATEGIES:
        problems.append(f"strategy '{ref.strategy}'")
    if ref.feature not in config.BENCH_FEATURES:
        problems.append(f"feature '{ref.feature}'")
    if ref.model not in config.BENCH_MODELS:
        problems.append(f"model '{ref.model}'")
    if problems:
        raise ReferenceMismatchError(f"unmatched reference key on line {ref.line}: {', '.join(problems)}")


def compare_to_reference(table: ResultsTable, reference: Union[str, Sequence[ReferenceRow]],
                         strict: bool = False) -> DiffReport:
    refs = load_reference(reference) if isinstance(reference, (str, os.PathLike)) else list(reference)
    diff = DiffReport()
    for ref in refs:
        if ref.status == STATUS_NOT_REPRODUCED:
            diff.skipped.append(ref)
            continue
        _check_key(ref)
        matches = table.find(ref.dataset, ref.strategy, ref.feature, ref.model, ref.analyzer, ref.ngram)
        if not matches:
            if strict:
                raise ReferenceMismatchError(f"reference row {ref.key} has no result (line {ref.line})")
            diff.not_run.append(ref)
            continue
        for row in matches:
            checks = [MetricCheck(m, ref.expected[m], _actual(row, m), ref.tolerance.get(m, 0.0))
                      for m in METRICS if m in ref.expected]
            diff.verdicts.append(RowVerdict(reference=ref, row_key=row.key, checks=checks))
    logger.info("reference comparison: %s", diff.summary())
    return diff
