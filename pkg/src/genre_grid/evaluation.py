"""Classification metrics: per-class precision/recall/F1, accuracy, macro and
weighted averages, confusion matrices."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvaluationReport:
    label_set: tuple[str, ...]
    per_class: dict  # label -> ClassMetrics
    accuracy: float
    macro_avg: tuple[float, float, float]  # (P, R, F1)
    weighted_avg: tuple[float, float, float]
    confusion: list  # confusion[i][j] = count of true label i predicted as j
    n: int
    zero_division_flags: tuple[str, ...]  # e.g. "precision/neither"

    @property
    def macro_f1(self) -> float:
        return self.macro_avg[2]

    def to_dict(self) -> dict:
        return {
            "label_set": list(self.label_set),
            "per_class": {
                label: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for label, m in self.per_class.items()
            },
            "accuracy": self.accuracy,
            "macro_avg": {
                "precision": self.macro_avg[0],
                "recall": self.macro_avg[1],
                "f1": self.macro_avg[2],
            },
            "weighted_avg": {
                "precision": self.weighted_avg[0],
                "recall": self.weighted_avg[1],
                "f1": self.weighted_avg[2],
            },
            "confusion": self.confusion,
            "n": self.n,
            "zero_division_flags": list(self.zero_division_flags),
        }

    def to_text(self) -> str:
        """Aligned table for terminals, one row per class plus the summary rows."""
        width = max(12, max(len(l) for l in self.label_set) + 2)
        lines = [
            f"{'':<{width}}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>10}"
        ]
        for label in self.label_set:
            m = self.per_class[label]
            lines.append(
                f"{label:<{width}}{m.precision:>10.2f}{m.recall:>10.2f}"
                f"{m.f1:>10.2f}{m.support:>10d}"
            )
        lines.append("")
        lines.append(f"{'accuracy':<{width}}{'':>10}{'':>10}{self.accuracy:>10.2f}{self.n:>10d}")
        p, r, f = self.macro_avg
        lines.append(f"{'macro avg':<{width}}{p:>10.2f}{r:>10.2f}{f:>10.2f}{self.n:>10d}")
        p, r, f = self.weighted_avg
        lines.append(f"{'weighted avg':<{width}}{p:>10.2f}{r:>10.2f}{f:>10.2f}{self.n:>10d}")
        return "\n".join(lines)


def confusion_matrix(y_true: list, y_pred: list, label_set: tuple | list) -> list:
    """confusion[i][j] = number of examples with true label i predicted as j."""
    if len(y_true) != len(y_pred):
        raise DataError(
            f"y_true and y_pred length mismatch: {len(y_true)} vs {len(y_pred)}"
        )
    index = {label: i for i, label in enumerate(label_set)}
    matrix = [[0] * len(label_set) for _ in label_set]
    for t, p in zip(y_true, y_pred):
        if t not in index:
            raise DataError(f"unknown true label {t!r} (label_set={list(label_set)})")
        if p not in index:
            raise DataError(f"unknown predicted label {p!r} (label_set={list(label_set)})")
        matrix[index[t]][index[p]] += 1
    return matrix


def evaluate(y_true: list, y_pred: list, label_set: tuple | list) -> EvaluationReport:
    """Full metric report. Undefined ratios (zero denominators) evaluate to 0
    and are listed in zero_division_flags."""
    if len(y_true) == 0:
        raise DataError("cannot evaluate an empty prediction set")
    matrix = confusion_matrix(y_true, y_pred, label_set)
    n = len(y_true)
    labels = tuple(label_set)
    flags: list[str] = []
    per_class: dict[str, ClassMetrics] = {}
    for i, label in enumerate(labels):
        tp = matrix[i][i]
        fp = sum(matrix[r][i] for r in range(len(labels))) - tp
        fn = sum(matrix[i][c] for c in range(len(labels))) - tp
        if tp + fp == 0:
            precision = 0.0
            flags.append(f"precision/{label}")
        else:
            precision = tp / (tp + fp)
        if tp + fn == 0:
            recall = 0.0
            flags.append(f"recall/{label}")
        else:
            recall = tp / (tp + fn)
        if precision + recall == 0.0:
            f1 = 0.0
            flags.append(f"f1/{label}")
        else:
            f1 = 2.0 * precision * recall / (precision + recall)
        per_class[label] = ClassMetrics(precision, recall, f1, tp + fn)

    k = len(labels)
    macro = (
        sum(per_class[l].precision for l in labels) / k,
        sum(per_class[l].recall for l in labels) / k,
        sum(per_class[l].f1 for l in labels) / k,
    )
    weighted = (
        sum(per_class[l].precision * per_class[l].support for l in labels) / n,
        sum(per_class[l].recall * per_class[l].support for l in labels) / n,
        sum(per_class[l].f1 * per_class[l].support for l in labels) / n,
    )
    accuracy = sum(matrix[i][i] for i in range(k)) / n
    return EvaluationReport(
        label_set=labels,
        per_class=per_class,
        accuracy=accuracy,
        macro_avg=macro,
        weighted_avg=weighted,
        confusion=matrix,
        n=n,
        zero_division_flags=tuple(flags),
    )


def save_report(report: EvaluationReport, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(report.to_dict(), ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
