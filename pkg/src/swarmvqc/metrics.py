"""Binary classification metrics and result-table rendering."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np


@dataclass(frozen=True)
class ConfusionCounts:
    """Counts with respect to a designated positive class."""

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion_counts(predictions, labels, positive_class: int) -> ConfusionCounts:
    predictions, labels = _as_aligned_arrays(predictions, labels)
    positive_pred = predictions == positive_class
    positive_true = labels == positive_class
    return ConfusionCounts(
        tp=int(np.sum(positive_pred & positive_true)),
        fp=int(np.sum(positive_pred & ~positive_true)),
        tn=int(np.sum(~positive_pred & ~positive_true)),
        fn=int(np.sum(~positive_pred & positive_true)),
    )


def _as_aligned_arrays(predictions, labels) -> tuple[np.ndarray, np.ndarray]:
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    if predictions.shape != labels.shape:
        raise ValueError(
            f"length mismatch: {predictions.shape} predictions vs {labels.shape} labels"
        )
    if predictions.size == 0:
        raise ValueError("empty input")
    return predictions, labels


def accuracy(predictions, labels) -> float:
    predictions, labels = _as_aligned_arrays(predictions, labels)
    return float(np.mean(predictions == labels))


def _safe_ratio(numerator: int, denominator: int) -> float:
    # Degenerate predictors yield empty denominators; report 0, not NaN.
    return numerator / denominator if denominator else 0.0


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def class_report(predictions, labels) -> dict[int, dict[str, float]]:
    """Per-class precision/recall/f1 for binary labels."""
    predictions, labels = _as_aligned_arrays(predictions, labels)
    if not set(np.unique(labels)) <= {0, 1}:
        raise ValueError("labels must be binary (0/1)")
    report = {}
    for cls in (0, 1):
        counts = confusion_counts(predictions, labels, positive_class=cls)
        precision = _safe_ratio(counts.tp, counts.tp + counts.fp)
        recall = _safe_ratio(counts.tp, counts.tp + counts.fn)
        report[cls] = {
            "precision": precision,
            "recall": recall,
            "f1": f1_score(precision, recall),
        }
    return report


def render_results_table(rows: Sequence[Mapping[str, object]],
                         columns: Sequence[str] | None = None) -> str:
    """Markdown table: one row per dataset, one column per method.

    The first column is the row label (key ``dataset``); every other cell
    is rendered as a percentage with one decimal.  Column order follows
    the first row (or the explicit ``columns``).
    """
    if columns is None:
        columns = list(rows[0].keys()) if rows else ["dataset"]
    columns = list(columns)
    header = "| " + " | ".join(columns) + " |"
    divider = "|" + "|".join(" --- " for _ in columns) + "|"
    lines = [header, divider]
    for i, row in enumerate(rows):
        if set(row.keys()) != set(columns):
            raise ValueError(f"row {i} keys {sorted(row)} do not match columns {sorted(columns)}")
        cells = []
        for name in columns:
            value = row[name]
            cells.append(f"{100.0 * value:.1f}%" if isinstance(value, float) else str(value))
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def write_results_csv(rows: Sequence[Mapping[str, object]], path) -> None:
    """Persist accuracy records as dataset,method,split,accuracy."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("dataset,method,split,accuracy\n")
        for row in rows:
            handle.write(f"{row['dataset']},{row['method']},{row['split']},{row['accuracy']!r}\n")


def write_class_report_csv(rows: Sequence[Mapping[str, object]], path) -> None:
    """Persist per-class records as dataset,method,class,precision,recall,f1."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("dataset,method,class,precision,recall,f1\n")
        for row in rows:
            handle.write(
                f"{row['dataset']},{row['method']},{row['class']},"
                f"{row['precision']!r},{row['recall']!r},{row['f1']!r}\n"
            )
