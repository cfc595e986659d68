# bench/report.py
from __future__ import annotations
import logging
from typing import Dict, List, Tuple

from common import config
from common.errors import ConfigError
from common.logger import CSVLogger
from common.utils import atomic_write
from bench.grid import ResultsTable
from features.pipeline import FEATURE_LABELS

logger = logging.getLogger(__name__)

FORMATS = ("csv", "markdown")
_MD_METRICS = (("precision", "P"), ("recall", "R"), ("accuracy", "Acc"), ("f1", "F1"), ("hamming_loss", "HL"))


def emit_report(table: ResultsTable, path: str, fmt: str = "csv") -> None:
    fmt = (fmt or "csv").lower()
    if fmt in ("md",):
        fmt = "markdown"
    if fmt not in FORMATS:
        raise ConfigError(f"report format must be one of {FORMATS}, got '{fmt}'")
    if fmt == "csv":
        with CSVLogger(str(path), config.REPORT_COLUMNS) as out:
            out.write_all(r.as_row(table.timing) for r in table.rows)
    else:
        with atomic_write(str(path)) as f:
            f.write("\n".join(render_markdown(table)) + "\n")
    logger.info("report (%s, %d rows) written to %s", fmt, len(table), path)


def render_markdown(table: ResultsTable) -> List[str]:
    """
    One line per (strategy, feature, variant, model); datasets side by side as
    column groups, the way the published results are laid out.
    """
    datasets = [d for d in config.BENCH_DATASETS if any(r.dataset == d for r in table.rows)]
    groups: Dict[Tuple[str, str, str, str, str], Dict[str, Dict[str, str]]] = {}
    for r in table.rows:
        key = (r.strategy.label, FEATURE_LABELS[r.feature], r.analyzer, r.ngram, r.model.label)
        groups.setdefault(key, {})[r.dataset] = r.report.metric_row()

    head = ["Strategy", "Feature", "Model"]
    for d in datasets:
        head += [f"{d} {short}" for _, short in _MD_METRICS]
    lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
    for (strategy, feature, analyzer, ngram, model), per_ds in groups.items():
        feat = f"{feature} ({analyzer} {ngram})" if analyzer else feature
        cells = [strategy, feat, model]
        for d in datasets:
            m = per_ds.get(d)
            cells += [m[k] if m else "" for k, _ in _MD_METRICS]
        lines.append("| " + " | ".join(cells) + " |")
    return lines
