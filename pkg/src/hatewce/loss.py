"""Class-weighted cross-entropy.

For logits ``z`` and true class ``c`` the per-example loss is::

    loss(z, c) = w[c] * (-z[c] + log(sum_j exp(z[j])))

with ``w`` larger for rarer classes, so mistakes on a minority class cost
more than mistakes on the majority class. The log-sum-exp is always evaluated
after subtracting the row maximum.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np

from .errors import DataError, InputError, NumericError


class WeightScheme(str, Enum):
    UNIFORM = "uniform"
    INVERSE_FREQUENCY_NORMALIZED = "inverse_frequency_normalized"


@dataclass(frozen=True)
class ClassWeights:
    weights: np.ndarray
    scheme: WeightScheme = WeightScheme.UNIFORM

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        w.setflags(write=False)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("class weights must be a non-empty vector")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError(f"class weights must be finite and positive, got {w.tolist()}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "scheme", WeightScheme(self.scheme))

    def __len__(self) -> int:
        return self.weights.size

    def __eq__(self, other):
        if not isinstance(other, ClassWeights):
            return NotImplemented
        return self.scheme == other.scheme and np.array_equal(self.weights, other.weights)

    def scaled(self, factor: float) -> "ClassWeights":
        return ClassWeights(self.weights * factor, self.scheme)

    @classmethod
    def uniform(cls, num_classes: int) -> "ClassWeights":
        return cls(np.ones(num_classes), WeightScheme.UNIFORM)


def compute_class_weights(counts: Mapping[int, int], scheme="inverse_frequency_normalized",
                          class_names=None) -> ClassWeights:
    """Resolve per-class weights from training-split class counts.

    ``inverse_frequency_normalized`` gives ``w_c = N / (K * n_c)``: the weight
    averaged over training examples is exactly 1, so the loss stays on the
    same scale as plain cross-entropy. Plain ``1 / n_c`` differs only by the
    global factor ``N / K``.
    """
    scheme = WeightScheme(scheme)
    k = len(counts)
    n_c = np.array([counts[c] for c in range(k)], dtype=np.float64)
    if scheme is WeightScheme.UNIFORM:
        return ClassWeights.uniform(k)
    empty = [c for c in range(k) if n_c[c] < 1]
    if empty:
        names = [class_names[c] if class_names else str(c) for c in empty]
        raise DataError(f"inverse-frequency weights need every class present; zero count for {', '.join(names)}")
    return ClassWeights(n_c.sum() / (k * n_c), scheme)


def _weight_vector(weights) -> np.ndarray:
    if isinstance(weights, ClassWeights):
        return weights.weights
    return np.asarray(weights, dtype=np.float64)


def _check_logits(logits: np.ndarray) -> None:
    if not np.all(np.isfinite(logits)):
        raise NumericError("logits contain NaN or infinity")


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = np.exp(logits - logits.max(axis=-1, keepdims=True))
    return shifted / shifted.sum(axis=-1, keepdims=True)


def weighted_ce(logits, cls: int, weights) -> float:
    z = np.asarray(logits, dtype=np.float64)
    _check_logits(z)
    w = _weight_vector(weights)
    if not 0 <= cls < z.size:
        raise InputError(f"class {cls} out of range for {z.size} logits")
    return float(-w[cls] * log_softmax(z)[cls])


def weighted_ce_grad(logits, cls: int, weights) -> np.ndarray:
    """d loss / d logits = w[c] * (softmax(z) - onehot(c))."""
    z = np.asarray(logits, dtype=np.float64)
    _check_logits(z)
    w = _weight_vector(weights)
    if not 0 <= cls < z.size:
        raise InputError(f"class {cls} out of range for {z.size} logits")
    g = softmax(z)
    g[cls] -= 1.0
    return w[cls] * g


def batch_loss(logits, labels, weights) -> tuple[float, np.ndarray]:
    """Mean weighted CE over the batch and its gradient w.r.t. the logits matrix."""
    z = np.asarray(logits, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if z.ndim != 2 or z.shape[0] < 1:
        raise InputError(f"expected a non-empty [B, K] logits matrix, got shape {z.shape}")
    if y.shape != (z.shape[0],):
        raise InputError(f"labels shape {y.shape} does not match batch size {z.shape[0]}")
    b, k = z.shape
    if np.any(y < 0) or np.any(y >= k):
        raise InputError(f"labels must lie in [0, {k}), got {sorted(set(y.tolist()))}")
    _check_logits(z)
    w = _weight_vector(weights)[y]
    rows = np.arange(b)
    per_example = -w * log_softmax(z)[rows, y]
    grad = softmax(z)
    grad[rows, y] -= 1.0
    grad *= (w / b)[:, None]
    return float(per_example.mean()), grad
