"""Constrained prediction over externally supplied logits, plus accuracy rollup.

Logits come from a file or pipe produced by whatever runtime scored the inputs;
nothing here depends on an ML framework. Predictions are restricted to the
first N_L entries so a wide output layer can serve tasks with fewer classes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator


class EmptyEvalError(ValueError):
    """Raised when an evaluation stream contains no records."""


class MissingGoldLabelError(ValueError):
    """Raised when a record lacks the gold label needed for scoring."""


@dataclass
class LogitsRecord:
    sample_id: str
    logits: list[float]
    gold_label: int | None = None


@dataclass
class EvalReport:
    task: str
    n_examples: int
    accuracy: float
    per_class_accuracy: list[float | None]
    per_class_counts: list[int]

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "n_examples": self.n_examples,
            "accuracy": self.accuracy,
            "per_class_accuracy": self.per_class_accuracy,
            "per_class_counts": self.per_class_counts,
        }


def constrained_predict(logits: list[float], n_l: int) -> int:
    """Index of the maximum over the first n_l logits; ties go to the lowest index."""
    if n_l < 1 or n_l > len(logits):
        raise ValueError(f"n_l must be in [1, {len(logits)}], got {n_l}")
    best = 0
    for i in range(1, n_l):
        if logits[i] > logits[best]:
            best = i
    return best


def evaluate(records: Iterable[LogitsRecord], n_l: int, task: str = "eval") -> EvalReport:
    """Score constrained predictions against gold labels."""
    correct = [0] * n_l
    counts = [0] * n_l
    n_examples = 0
    for rec in records:
        if rec.gold_label is None:
            raise MissingGoldLabelError(f"record {rec.sample_id!r} has no gold_label")
        if not 0 <= rec.gold_label < n_l:
            raise ValueError(
                f"record {rec.sample_id!r}: gold_label {rec.gold_label} out of range"
                f" for {n_l} classes"
            )
        prediction = constrained_predict(rec.logits, n_l)
        counts[rec.gold_label] += 1
        if prediction == rec.gold_label:
            correct[rec.gold_label] += 1
        n_examples += 1
    if n_examples == 0:
        raise EmptyEvalError("no records to evaluate")
    per_class = [
        (correct[c] / counts[c]) if counts[c] else None for c in range(n_l)
    ]
    return EvalReport(
        task=task,
        n_examples=n_examples,
        accuracy=sum(correct) / n_examples,
        per_class_accuracy=per_class,
        per_class_counts=counts,
    )


def read_logits(path: str | Path) -> Iterator[LogitsRecord]:
    """Parse a line-delimited logits file."""
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"line {line_no}: invalid JSON: {exc}") from exc
            try:
                logits = [float(x) for x in record["logits"]]
                gold = record.get("gold_label")
                yield LogitsRecord(
                    sample_id=str(record.get("sample_id", f"line-{line_no}")),
                    logits=logits,
                    gold_label=None if gold is None else int(gold),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"line {line_no}: malformed logits record: {exc}") from exc


def format_report(report: EvalReport) -> str:
    """Human-readable accuracy table."""
    lines = [
        f"task: {report.task}",
        f"examples: {report.n_examples}",
        f"accuracy: {report.accuracy:.4f}",
        "class  count  accuracy",
    ]
    for c, (count, acc) in enumerate(zip(report.per_class_counts, report.per_class_accuracy)):
        shown = "-" if acc is None else f"{acc:.4f}"
        lines.append(f"{c:>5}  {count:>5}  {shown}")
    return "\n".join(lines)
