"""Message-polarity metrics: macro recall, F1 over positive/negative, accuracy."""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .text import LABELS

CLASSES = LABELS  # negative, neutral, positive
_INDEX = {c: i for i, c in enumerate(CLASSES)}


class AbsentClassWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    """3x3 counts indexed ``[gold][pred]`` in negative/neutral/positive order."""

    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def recall(self, cls: str) -> float:
        i = _INDEX[cls]
        row = self.counts[i].sum()
        return float(self.counts[i, i] / row) if row else 0.0

    def precision(self, cls: str) -> float:
        i = _INDEX[cls]
        col = self.counts[:, i].sum()
        return float(self.counts[i, i] / col) if col else 0.0

    def f1(self, cls: str) -> float:
        p, r = self.precision(cls), self.recall(cls)
        return 2 * p * r / (p + r) if p + r else 0.0


def confusion_matrix(gold: Sequence[str], pred: Sequence[str]) -> ConfusionMatrix:
    if len(gold) != len(pred):
        raise ValueError(f"{len(gold)} gold labels but {len(pred)} predictions")
    counts = np.zeros((3, 3), dtype=np.int64)
    for g, p in zip(gold, pred):
        for label in (g, p):
            if label not in _INDEX:
                raise ValueError(f"unknown label {label!r}; expected one of {', '.join(CLASSES)}")
        counts[_INDEX[g], _INDEX[p]] += 1
    return ConfusionMatrix(counts)


def macro_recall(m: ConfusionMatrix) -> float:
    """Unweighted mean of the three per-class recalls.

    A class missing from the gold labels counts as recall 0 and triggers an
    :class:`AbsentClassWarning`.
    """
    absent = [c for c in CLASSES if m.counts[_INDEX[c]].sum() == 0]
    if absent:
        warnings.warn(f"no gold examples for {', '.join(absent)}; recall taken as 0",
                      AbsentClassWarning, stacklevel=2)
    return sum(m.recall(c) for c in CLASSES) / len(CLASSES)


def f1_pn(m: ConfusionMatrix) -> float:
    return (m.f1("positive") + m.f1("negative")) / 2


def accuracy(m: ConfusionMatrix) -> float:
    if m.total == 0:
        raise ValueError("accuracy is undefined for an empty confusion matrix")
    return float(np.trace(m.counts) / m.total)


@dataclass(frozen=True)
class EvalReport:
    rho: float
    f1_pn: float
    acc: float
    per_class: dict
    n: int

    def to_dict(self) -> dict:
        return asdict(self)


def report(m: ConfusionMatrix) -> EvalReport:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AbsentClassWarning)
        rho = macro_recall(m)
    per_class = {c: {"recall": m.recall(c), "precision": m.precision(c), "f1": m.f1(c),
                     "support": int(m.counts[_INDEX[c]].sum())} for c in CLASSES}
    return EvalReport(rho, f1_pn(m), accuracy(m), per_class, m.total)


def evaluate(gold: Sequence[str], pred: Sequence[str]) -> EvalReport:
    return report(confusion_matrix(gold, pred))


BASELINES = (("baseline 1", "positive"), ("baseline 2", "negative"), ("baseline 3", "neutral"))


def baseline_report(gold: Sequence[str]) -> list:
    """Reports for the constant predictors all-positive, all-negative, all-neutral."""
    if not gold:
        raise ValueError("baselines need at least one gold label")
    return [evaluate(gold, [label] * len(gold)) for _, label in BASELINES]


def format_table(rows: Sequence[tuple]) -> str:
    """Render ``(name, EvalReport)`` rows as a rho / F1^PN / Acc table."""
    width = max([len("System")] + [len(name) for name, _ in rows])
    lines = [f"{'System':<{width}}  {'rho':>6}  {'F1^PN':>6}  {'Acc':>6}"]
    lines.append("-" * len(lines[0]))
    for name, r in rows:
        lines.append(f"{name:<{width}}  {r.rho:6.3f}  {r.f1_pn:6.3f}  {r.acc:6.3f}")
    return "\n".join(lines)
