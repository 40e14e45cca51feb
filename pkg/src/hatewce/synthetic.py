"""Seeded synthetic tweet corpora for sanity checks and the imbalance experiment."""

from __future__ import annotations

import numpy as np

from .corpus import Dataset, from_records


def separable_corpus(n: int = 200, pool: int = 100, length: int = 30, seed: int = 0) -> Dataset:
    """Balanced task-A corpus where each class draws words from its own disjoint pool.

    HOF texts use ``h0..h{pool-1}``, NOT texts use ``n0..n{pool-1}``; labels
    alternate, so any single token decides the class.
    """
    rng = np.random.default_rng(seed)
    records = []
    for i in range(n):
        label = "HOF" if i % 2 == 0 else "NOT"
        prefix = "h" if label == "HOF" else "n"
        words = [f"{prefix}{j}" for j in rng.integers(0, pool, size=length)]
        records.append((f"s{i:04d}", " ".join(words), label))
    return from_records(records, "A")


def imbalanced_corpus(seed: int, n: int = 1000, minority_share: float = 0.1,
                      noise: float = 0.1, length: int = 12, signal_prob: float = 0.25,
                      signal_pool: int = 20, neutral_pool: int = 200) -> Dataset:
    """Task-A corpus with a rare HOF class and noisy labels.

    Exactly ``round(n * minority_share)`` examples are labeled HOF. Each token
    is a class-indicative word with probability ``signal_prob`` and a shared
    neutral word otherwise. With probability ``noise`` an example's text is
    generated from the opposite class, so its label disagrees with its content.
    """
    rng = np.random.default_rng(seed)
    n_min = int(round(n * minority_share))
    labels = ["HOF"] * n_min + ["NOT"] * (n - n_min)
    records = []
    for i, label in enumerate(labels):
        source = label
        if rng.random() < noise:
            source = "NOT" if label == "HOF" else "HOF"
        prefix = "h" if source == "HOF" else "n"
        words = []
        for _ in range(length):
            if rng.random() < signal_prob:
                words.append(f"{prefix}{rng.integers(signal_pool)}")
            else:
                words.append(f"w{rng.integers(neutral_pool)}")
        records.append((f"i{i:05d}", " ".join(words), label))
    order = rng.permutation(n)
    return from_records([records[j] for j in order], "A")


def separating_tokens(dataset: Dataset, lowercase: bool = True) -> dict[int, set[str]]:
    """Per class, the tokens that occur in that class and in no other.

    A corpus is separable by token presence when every example contains at
    least one token from its own class's set.
    """
    from .textenc import tokenize

    seen: dict[int, set[str]] = {}
    for ex, lab in zip(dataset.examples, dataset.labels()):
        seen.setdefault(lab, set()).update(tokenize(ex.text, lowercase))
    out = {}
    for lab, toks in seen.items():
        others = set().union(*(t for l, t in seen.items() if l != lab))
        out[lab] = toks - others
    return out
