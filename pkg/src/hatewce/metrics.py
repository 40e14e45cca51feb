"""Confusion matrix and macro-averaged F1."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class ClassScore:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class Metrics:
    confusion: np.ndarray  # [K, K], rows = truth, cols = prediction
    per_class: tuple[ClassScore, ...]
    macro_f1: float

    @property
    def n(self) -> int:
        return int(self.confusion.sum())

    def recall(self, cls: int) -> float:
        return self.per_class[cls].recall

    def to_dict(self, class_names=None) -> dict:
        names = class_names or [str(i) for i in range(len(self.per_class))]
        return {
            "n": self.n,
            "macro_f1": self.macro_f1,
            "per_class": [
                {"class": name, "precision": s.precision, "recall": s.recall, "f1": s.f1}
                for name, s in zip(names, self.per_class)
            ],
            "confusion": self.confusion.tolist(),
        }


def confusion(truth, pred, num_classes: int) -> np.ndarray:
    truth = np.asarray(truth, dtype=np.int64).reshape(-1)
    pred = np.asarray(pred, dtype=np.int64).reshape(-1)
    if truth.shape != pred.shape:
        raise InputError(f"truth has {truth.size} entries, predictions {pred.size}")
    if truth.size == 0:
        raise InputError("cannot score an empty prediction set")
    for name, arr in (("truth", truth), ("pred", pred)):
        if arr.min() < 0 or arr.max() >= num_classes:
            raise InputError(f"{name} ids must lie in [0, {num_classes})")
    out = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(out, (truth, pred), 1)
    return out


def _ratio(num, den) -> Fraction:
    return Fraction(num, den) if den else Fraction(0)


def macro_f1(conf) -> tuple[tuple[ClassScore, ...], float]:
    """Per-class precision/recall/F1 and their unweighted mean.

    Any 0/0 is taken as 0, and classes with no support still count towards
    the mean. Arithmetic is exact and rounded to float once at the end.
    """
    conf = np.asarray(conf, dtype=np.int64)
    k = conf.shape[0]
    if conf.shape != (k, k) or k < 2:
        raise InputError(f"confusion must be a square matrix with K >= 2, got {conf.shape}")
    scores, exact = [], []
    for c in range(k):
        tp = int(conf[c, c])
        fp = int(conf[:, c].sum()) - tp
        fn = int(conf[c, :].sum()) - tp
        p = _ratio(tp, tp + fp)
        r = _ratio(tp, tp + fn)
        f1 = 2 * p * r / (p + r) if p + r else Fraction(0)
        exact.append(f1)
        scores.append(ClassScore(float(p), float(r), float(f1)))
    return tuple(scores), float(sum(exact) / k)


def compute_metrics(truth, pred, num_classes: int) -> Metrics:
    conf = confusion(truth, pred, num_classes)
    per_class, macro = macro_f1(conf)
    return Metrics(conf, per_class, macro)
