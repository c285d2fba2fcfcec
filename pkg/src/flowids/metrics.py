"""Evaluation kernels: confusion matrix, classification report, ROC/AUC,
and Pearson correlation (with explicit Undefined for zero-variance columns).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataframe import DataFrame, LabelVector, SchemaError, ColumnKind
from .preprocess import FeatureMatrix


@dataclass
class ConfusionMatrix:
    counts: np.ndarray  # 2x2 int64, [true][predicted]

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (2, 2):
            raise ValueError("confusion matrix must be 2x2")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_dict(self) -> dict:
        return {"counts": self.counts.tolist()}


@dataclass
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class ClassReport:
    per_class: dict[int, ClassMetrics]
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    total: int

    def to_dict(self) -> dict:
        return {
            "per_class": {
                str(c): {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for c, m in self.per_class.items()
            },
            "accuracy": self.accuracy,
            "macro": {
                "precision": self.macro_precision,
                "recall": self.macro_recall,
                "f1": self.macro_f1,
            },
            "weighted": {
                "precision": self.weighted_precision,
                "recall": self.weighted_recall,
                "f1": self.weighted_f1,
            },
            "total": self.total,
        }


@dataclass
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray  # descending; first entry is a sentinel above max score
    auc: float

    def to_dict(self) -> dict:
        return {
            "fpr": self.fpr.tolist(),
            "tpr": self.tpr.tolist(),
            "thresholds": self.thresholds.tolist(),
            "auc": self.auc,
        }


@dataclass
class CorrelationMatrix:
    names: list[str]
    matrix: np.ndarray   # float64; NaN marks Undefined (zero-variance column)

    def is_defined(self, i: int, j: int) -> bool:
        return bool(np.isfinite(self.matrix[i, j]))

    def to_dict(self) -> dict:
        return {
            "names": self.names,
            "matrix": [
                [v if np.isfinite(v) else None for v in row]
                for row in self.matrix.tolist()
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CorrelationMatrix":
        mat = np.array(
            [[np.nan if v is None else v for v in row] for row in d["matrix"]],
            dtype=np.float64,
        )
        return cls(names=list(d["names"]), matrix=mat)


def confusion(y_true: LabelVector, y_pred: LabelVector) -> ConfusionMatrix:
    t = y_true.values
    p = y_pred.values
    if len(t) != len(p):
        raise ValueError(f"length mismatch: {len(t)} true vs {len(p)} predicted")
    if len(t) == 0:
        raise ValueError("cannot build a confusion matrix from zero samples")
    counts = np.zeros((2, 2), dtype=np.int64)
    np.add.at(counts, (t, p), 1)
    return ConfusionMatrix(counts)


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = (
        2.0 * precision * recall / (precision + recall)
        if precision + recall > 0
        else 0.0
    )
    return precision, recall, f1


def class_report(y_true: LabelVector, y_pred: LabelVector) -> ClassReport:
    cm = confusion(y_true, y_pred).counts
    total = int(cm.sum())
    per_class = {}
    for c in (0, 1):
        tp = int(cm[c, c])
        fp = int(cm[1 - c, c])
        fn = int(cm[c, 1 - c])
        p, r, f = _prf(tp, fp, fn)
        per_class[c] = ClassMetrics(p, r, f, int(cm[c].sum()))
    supports = np.array([per_class[0].support, per_class[1].support], dtype=np.float64)
    weights = supports / total
    prec = np.array([per_class[0].precision, per_class[1].precision])
    rec = np.array([per_class[0].recall, per_class[1].recall])
    f1s = np.array([per_class[0].f1, per_class[1].f1])
    return ClassReport(
        per_class=per_class,
        accuracy=float(np.trace(cm)) / total,
        macro_precision=float(prec.mean()),
        macro_recall=float(rec.mean()),
        macro_f1=float(f1s.mean()),
        weighted_precision=float(prec @ weights),
        weighted_recall=float(rec @ weights),
        weighted_f1=float(f1s @ weights),
        total=total,
    )


def roc(y_true: LabelVector, scores: np.ndarray) -> RocCurve:
    """ROC over thresholds = distinct descending scores plus a leading sentinel.

    At threshold t a sample is predicted positive iff score >= t, so the
    curve starts at (0, 0) under the sentinel and ends at (1, 1).
    """
    t = y_true.values
    s = np.asarray(scores, dtype=np.float64)
    if len(t) != len(s):
        raise ValueError(f"length mismatch: {len(t)} labels vs {len(s)} scores")
    n_pos = int(np.sum(t))
    n_neg = len(t) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC requires both classes in y_true")

    order = np.argsort(-s, kind="stable")
    ss = s[order]
    st = t[order]
    cum_tp = np.cumsum(st)
    cum_fp = np.cumsum(1 - st)
    # last index of each run of equal scores
    last = np.nonzero(np.append(ss[1:] != ss[:-1], True))[0]
    tpr = np.concatenate([[0.0], cum_tp[last] / n_pos])
    fpr = np.concatenate([[0.0], cum_fp[last] / n_neg])
    thresholds = np.concatenate([[ss[0] + 1.0], ss[last]])
    auc = float(np.trapezoid(tpr, fpr))
    return RocCurve(fpr=fpr, tpr=tpr, thresholds=thresholds, auc=auc)


def pearson(M: FeatureMatrix) -> CorrelationMatrix:
    """Pairwise Pearson r; zero-variance columns are Undefined (NaN) everywhere."""
    X = M.values
    n, d = X.shape
    if n < 2:
        raise ValueError("Pearson correlation needs at least 2 rows")
    centered = X - X.mean(axis=0)
    norms = np.sqrt(np.sum(centered * centered, axis=0))
    defined = norms > 0.0
    safe = np.where(defined, norms, 1.0)
    unit = centered / safe
    mat = unit.T @ unit
    np.clip(mat, -1.0, 1.0, out=mat)
    np.fill_diagonal(mat, 1.0)
    mat[~defined, :] = np.nan
    mat[:, ~defined] = np.nan
    return CorrelationMatrix(names=list(M.names), matrix=mat)


_CORRELATION_COLUMNS = ["proto", "service", "state", "label"]


def dummify_for_correlation(frame: DataFrame) -> FeatureMatrix:
    """The reduced matrix behind the correlation heatmap: one-hot proto,
    service, and state (sorted vocabularies), with label passed through.
    """
    for name in _CORRELATION_COLUMNS:
        if not frame.has_column(name):
            raise SchemaError(f"correlation frame is missing column {name!r}")
    blocks = []
    names: list[str] = []
    for col_name in _CORRELATION_COLUMNS[:-1]:
        spec, col = frame.column(col_name)
        if spec.kind is not ColumnKind.CATEGORICAL:
            raise SchemaError(f"column {col_name!r} must be categorical")
        vocab = sorted(set(col))
        index = {cat: i for i, cat in enumerate(vocab)}
        block = np.zeros((frame.row_count, len(vocab)))
        for row, value in enumerate(col):
            block[row, index[value]] = 1.0
        blocks.append(block)
        names.extend(f"{col_name}={cat}" for cat in vocab)
    _, label = frame.column("label")
    blocks.append(np.asarray(label, dtype=np.float64).reshape(-1, 1))
    names.append("label")
    return FeatureMatrix(np.hstack(blocks), names)
