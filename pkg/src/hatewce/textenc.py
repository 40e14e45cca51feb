"""Word-level tweet tokenizer, vocabulary, length policy and batch encoding."""

from __future__ import annotations

import math
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError

PAD = "<pad>"
UNK = "<unk>"
PAD_ID = 0
UNK_ID = 1

_ATTACHING = frozenset("#@")


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _split_chunk(chunk: str) -> list[str]:
    trailing = []
    end = len(chunk)
    while end > 0 and _is_punct(chunk[end - 1]):
        end -= 1
        trailing.append(chunk[end])
    leading = []
    start = 0
    while start < end and _is_punct(chunk[start]):
        nxt = chunk[start + 1] if start + 1 < end else ""
        if chunk[start] in _ATTACHING and nxt and not _is_punct(nxt):
            break
        leading.append(chunk[start])
        start += 1
    core = [chunk[start:end]] if start < end else []
    return leading + core + trailing[::-1]


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    """Split on whitespace, then peel punctuation off both ends of each chunk.

    Every peeled character becomes its own token. ``#`` and ``@`` directly in
    front of a word stay attached to it, so hashtags and mentions survive.
    Punctuation inside a chunk (``don't``, ``a.b``) is left alone.

    >>> tokenize("@user, stop.")
    ['@user', ',', 'stop', '.']
    """
    if lowercase:
        text = text.lower()
    tokens: list[str] = []
    for chunk in text.split():
        tokens.extend(_split_chunk(chunk))
    return tokens


@dataclass(frozen=True)
class Vocabulary:
    tokens: tuple[str, ...]
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        tokens = tuple(self.tokens)
        if tokens[:2] != (PAD, UNK):
            raise ValueError(f"vocabulary must start with {PAD!r}, {UNK!r}")
        index = {tok: i for i, tok in enumerate(tokens)}
        if len(index) != len(tokens):
            raise ValueError("duplicate tokens in vocabulary")
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "index", index)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def lookup(self, tokens: Iterable[str]) -> list[int]:
        return [self.index.get(t, UNK_ID) for t in tokens]

    def decode(self, ids: Iterable[int]) -> list[str]:
        return [self.tokens[i] for i in ids]


def build_vocab(corpus: Iterable[Sequence[str]], min_freq: int = 2) -> Vocabulary:
    """Keep tokens seen at least ``min_freq`` times, most frequent first, ties alphabetical."""
    if min_freq < 1:
        raise ArgumentError(f"min_freq must be >= 1, got {min_freq}")
    freq = Counter()
    for toks in corpus:
        freq.update(toks)
    for reserved in (PAD, UNK):
        freq.pop(reserved, None)
    kept = sorted((t for t, n in freq.items() if n >= min_freq), key=lambda t: (-freq[t], t))
    return Vocabulary((PAD, UNK, *kept))


def select_max_len(lengths: Sequence[int], percentile: float = 99) -> int:
    """Nearest-rank percentile of token counts: sorted[ceil(p/100 * n)] (1-based)."""
    if len(lengths) == 0:
        raise ArgumentError("select_max_len needs at least one length")
    if not 0 < percentile <= 100:
        raise ArgumentError(f"percentile must lie in (0, 100], got {percentile}")
    ordered = sorted(int(x) for x in lengths)
    if ordered[0] < 1:
        raise ArgumentError("all lengths must be >= 1")
    # exact rational arithmetic so 99% of 200 is 198, not 198.00000000000003
    rank = math.ceil(Fraction(str(percentile)) * len(ordered) / 100)
    rank = min(max(rank, 1), len(ordered))
    return ordered[rank - 1]


@dataclass
class EncodedBatch:
    ids: np.ndarray  # [B, L] int64
    mask: np.ndarray  # [B, L] float64, 1.0 on real tokens
    labels: np.ndarray  # [B] int64, -1 where unlabeled
    lengths: np.ndarray  # [B] int64

    def __len__(self) -> int:
        return self.ids.shape[0]

    def rows(self, start: int, stop: int) -> "EncodedBatch":
        return EncodedBatch(self.ids[start:stop], self.mask[start:stop],
                            self.labels[start:stop], self.lengths[start:stop])

    def take(self, index) -> "EncodedBatch":
        index = np.asarray(index, dtype=np.int64)
        return EncodedBatch(self.ids[index], self.mask[index], self.labels[index], self.lengths[index])


def encode_tokens(tokens: Sequence[str], vocab: Vocabulary, max_len: int) -> list[int]:
    ids = vocab.lookup(tokens[:max_len])
    return ids if ids else [UNK_ID]


def encode_batch(examples: Sequence, vocab: Vocabulary, max_len: int, lowercase: bool = True,
                 task=None) -> EncodedBatch:
    """Tokenize, truncate to ``max_len``, map to ids and right-pad with PAD.

    Truncation happens on the token list before UNK mapping. An empty token
    list encodes as a single UNK. ``task`` selects which label goes into
    ``labels``; unlabeled rows (or ``task=None``) get -1.
    """
    if max_len < 1:
        raise ArgumentError(f"max_len must be >= 1, got {max_len}")
    n = len(examples)
    ids = np.full((n, max_len), PAD_ID, dtype=np.int64)
    mask = np.zeros((n, max_len), dtype=np.float64)
    labels = np.full(n, -1, dtype=np.int64)
    lengths = np.zeros(n, dtype=np.int64)
    for i, ex in enumerate(examples):
        row = encode_tokens(tokenize(ex.text, lowercase), vocab, max_len)
        ids[i, : len(row)] = row
        mask[i, : len(row)] = 1.0
        lengths[i] = len(row)
        if task is not None:
            lab = ex.label(task)
            if lab is not None:
                labels[i] = lab
    return EncodedBatch(ids, mask, labels, lengths)
