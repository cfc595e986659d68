# metrics/report.py
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from common import config
from common.errors import DataError
from metrics.scores import (
    ConfusionCounts, exact_match_accuracy, hamming_loss, jaccard_accuracy, micro_prf,
)
from multilabel.strategies import MultiLabelModel, consistency_postprocess_matrix, predict_batch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalReport:
    micro_precision: float
    micro_recall: float
    micro_f1: float
    exact_match_accuracy: float
    hamming_loss: float
    jaccard_accuracy: float
    n: int
    n_labels: int = config.N_LABELS
    per_label: List[Dict[str, Any]] = field(default_factory=list)
    fingerprint: str = ""
    seed: int = 0
    consistent: Optional["EvalReport"] = None     # same metrics after consistency post-processing

    def metric_row(self, decimals: int = config.REPORT_DECIMALS) -> Dict[str, str]:
        """The five reported metric columns, fixed decimals."""
        fmt = f"{{:.{decimals}f}}"
        return {
            "precision": fmt.format(self.micro_precision),
            "recall": fmt.format(self.micro_recall),
            "accuracy": fmt.format(self.exact_match_accuracy),
            "f1": fmt.format(self.micro_f1),
            "hamming_loss": fmt.format(self.hamming_loss),
        }

    def to_dict(self) -> Dict[str, Any]:
        d = {
            "micro_precision": self.micro_precision,
            "micro_recall": self.micro_recall,
            "micro_f1": self.micro_f1,
            "exact_match_accuracy": self.exact_match_accuracy,
            "hamming_loss": self.hamming_loss,
            "jaccard_accuracy": self.jaccard_accuracy,
            "n": self.n,
            "n_labels": self.n_labels,
            "per_label": self.per_label,
            "fingerprint": self.fingerprint,
            "seed": self.seed,
        }
        if self.consistent is not None:
            d["consistent"] = self.consistent.to_dict()
        return d

    def summary(self) -> str:
        return (f"P={self.micro_precision:.4f} R={self.micro_recall:.4f} Acc={self.exact_match_accuracy:.4f} "
                f"F1={self.micro_f1:.4f} HL={self.hamming_loss:.4f} (n={self.n})")


def compute_report(Y, Y_hat, fingerprint: str = "", seed: int = 0,
                   consistent_hat: Optional[np.ndarray] = None) -> EvalReport:
    Y = np.asarray(Y, dtype=np.int8)
    Y_hat = np.asarray(Y_hat, dtype=np.int8)
    p, r, f1 = micro_prf(Y, Y_hat)
    cc = ConfusionCounts(Y.shape[1])
    cc.update(Y, Y_hat)
    consistent = None
    if consistent_hat is not None:
        consistent = compute_report(Y, consistent_hat, fingerprint, seed)
    return EvalReport(
        micro_precision=p,
        micro_recall=r,
        micro_f1=f1,
        exact_match_accuracy=exact_match_accuracy(Y, Y_hat),
        hamming_loss=hamming_loss(Y, Y_hat),
        jaccard_accuracy=jaccard_accuracy(Y, Y_hat),
        n=Y.shape[0],
        n_labels=Y.shape[1],
        per_label=cc.per_label(),
        fingerprint=fingerprint,
        seed=seed,
        consistent=consistent,
    )


def evaluate(model: MultiLabelModel, X_test, Y_test, fingerprint: str = "", seed: int = 0) -> EvalReport:
    """Metrics on RAW predictions; the consistency-forced variant rides along in `consistent`."""
    Y_test = np.asarray(Y_test, dtype=np.int8)
    if Y_test.shape[0] == 0:
        raise DataError("cannot evaluate on an empty test set")
    pred = predict_batch(model, X_test)
    report = compute_report(Y_test, pred.bits, fingerprint, seed,
                            consistent_hat=consistency_postprocess_matrix(pred.bits))
    logger.debug("evaluate: %s", report.summary())
    return report
