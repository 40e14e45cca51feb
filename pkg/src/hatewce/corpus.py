"""HASOC-style labeled tweet data: label schemes, loading, counts, splits."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError, DataError, InputEncodingError, ParseError, SchemaError


class Task(str, Enum):
    A = "A"
    B = "B"


TASK_COLUMNS = {Task.A: "task1", Task.B: "task2"}


@dataclass(frozen=True)
class LabelScheme:
    task: Task
    classes: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.classes)) != len(self.classes):
            raise ValueError(f"duplicate class names in {self.classes}")

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def class_id(self, name: str) -> int:
        try:
            return self.classes.index(name)
        except ValueError:
            raise KeyError(name) from None

    @property
    def column(self) -> str:
        return TASK_COLUMNS[self.task]


SCHEME_A = LabelScheme(Task.A, ("HOF", "NOT"))
SCHEME_B = LabelScheme(Task.B, ("HATE", "OFFN", "PRFN", "NONE"))
# label_a == NOT <=> label_b == NONE
_NOT_ID = SCHEME_A.class_id("NOT")
_NONE_ID = SCHEME_B.class_id("NONE")


def scheme_for(task) -> LabelScheme:
    task = Task(task)
    return SCHEME_A if task is Task.A else SCHEME_B


@dataclass(frozen=True)
class LabeledExample:
    id: str
    text: str
    label_a: int | None = None
    label_b: int | None = None

    def label(self, task) -> int | None:
        return self.label_a if Task(task) is Task.A else self.label_b


@dataclass(frozen=True)
class Dataset:
    scheme: LabelScheme
    examples: tuple[LabeledExample, ...]
    language: str = ""

    def __post_init__(self):
        object.__setattr__(self, "examples", tuple(self.examples))
        seen = set()
        for ex in self.examples:
            if ex.id in seen:
                raise DataError(f"duplicate tweet_id {ex.id!r}")
            seen.add(ex.id)
            for lab, scheme in ((ex.label_a, SCHEME_A), (ex.label_b, SCHEME_B)):
                if lab is not None and not 0 <= lab < scheme.num_classes:
                    raise DataError(
                        f"example {ex.id!r}: label id {lab} outside task {scheme.task.value} scheme"
                    )

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    @property
    def task(self) -> Task:
        return self.scheme.task

    def labels(self) -> list[int]:
        out = []
        for ex in self.examples:
            lab = ex.label(self.task)
            if lab is None:
                raise DataError(f"example {ex.id!r} has no task {self.task.value} label")
            out.append(lab)
        return out

    def ids(self) -> list[str]:
        return [ex.id for ex in self.examples]

    def subset(self, indices: Iterable[int]) -> "Dataset":
        return Dataset(self.scheme, tuple(self.examples[i] for i in indices), self.language)


def _delimiter_char(delimiter: str) -> str:
    named = {"tab": "\t", "comma": ",", "\t": "\t", ",": ","}
    try:
        return named[delimiter]
    except KeyError:
        raise ArgumentError(f"delimiter must be tab or comma, got {delimiter!r}") from None


def _read_rows(path, delimiter: str) -> tuple[list[str], list[tuple[int, list[str]]]]:
    """Return (header, [(row_number, fields)]); row numbers are 1-based file records."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    try:
        text = path.read_bytes().decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise InputEncodingError(f"{path}: not valid UTF-8 ({exc.reason} at byte {exc.start})") from None
    reader = csv.reader(io.StringIO(text, newline=""), delimiter=_delimiter_char(delimiter),
                        quotechar='"', strict=False)
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError(f"{path}: empty file, expected a header row") from None
    header = [h.strip() for h in header]
    rows = []
    for fields in reader:
        if not fields or all(not f.strip() for f in fields):
            continue
        rows.append((len(rows) + 2, fields))
    return header, rows


def _column_index(header: list[str], name: str, path) -> int:
    try:
        return header.index(name)
    except ValueError:
        raise SchemaError(f"{path}: missing required column {name!r}") from None


def _parse_label(value: str, scheme: LabelScheme, row: int, path) -> int:
    try:
        return scheme.class_id(value.strip())
    except KeyError:
        raise ParseError(
            f"{path}: row {row}: unknown {scheme.column} label {value!r} "
            f"(expected one of {', '.join(scheme.classes)})"
        ) from None


def load_dataset(path, delimiter: str = "tab", task="A", language: str = "") -> Dataset:
    """Read a labeled HASOC file.

    The header must contain ``tweet_id``, ``text`` and the label column for
    ``task`` (``task1`` or ``task2``). The other task's column is read too when
    present, and the NOT/NONE coupling between them is enforced. Row numbers in
    error messages count the header as row 1.
    """
    scheme = scheme_for(task)
    header, rows = _read_rows(path, delimiter)
    id_col = _column_index(header, "tweet_id", path)
    text_col = _column_index(header, "text", path)
    _column_index(header, scheme.column, path)
    label_cols = {s.task: header.index(s.column) for s in (SCHEME_A, SCHEME_B) if s.column in header}

    examples = []
    width = len(header)
    for row_no, fields in rows:
        if len(fields) < width:
            fields = fields + [""] * (width - len(fields))
        tweet_id = fields[id_col].strip()
        text = fields[text_col]
        if not tweet_id:
            raise ParseError(f"{path}: row {row_no}: empty tweet_id")
        if not text.strip():
            raise ParseError(f"{path}: row {row_no}: empty text")
        labels = {}
        for t, col in label_cols.items():
            raw = fields[col].strip()
            if not raw:
                if t is scheme.task:
                    raise ParseError(f"{path}: row {row_no}: missing {scheme.column} label")
                labels[t] = None
                continue
            labels[t] = _parse_label(raw, scheme_for(t), row_no, path)
        la, lb = labels.get(Task.A), labels.get(Task.B)
        if la is not None and lb is not None and (la == _NOT_ID) != (lb == _NONE_ID):
            raise ParseError(
                f"{path}: row {row_no}: task1={SCHEME_A.classes[la]} inconsistent with "
                f"task2={SCHEME_B.classes[lb]} (NOT must pair with NONE)"
            )
        examples.append(LabeledExample(tweet_id, text, la, lb))

    ids = Counter(ex.id for ex in examples)
    dupes = sorted(i for i, c in ids.items() if c > 1)
    if dupes:
        raise DataError(f"{path}: duplicate tweet_id values: {', '.join(dupes[:5])}")
    return Dataset(scheme, tuple(examples), language)


def load_texts(path, delimiter: str = "tab") -> list[LabeledExample]:
    """Read an unlabeled ``tweet_id``/``text`` file for prediction.

    Duplicate ids and empty texts are allowed here; every row is kept.
    """
    header, rows = _read_rows(path, delimiter)
    id_col = _column_index(header, "tweet_id", path)
    text_col = _column_index(header, "text", path)
    out = []
    for _, fields in rows:
        fields = fields + [""] * (len(header) - len(fields))
        out.append(LabeledExample(fields[id_col].strip(), fields[text_col]))
    return out


def class_counts(dataset: Dataset) -> dict[int, int]:
    counts = {c: 0 for c in range(dataset.scheme.num_classes)}
    for lab in dataset.labels():
        counts[lab] += 1
    return counts


def _train_take(n: int, train_fraction: float) -> int:
    k = math.floor(train_fraction * n + 0.5)
    if n >= 2:
        k = min(max(k, 1), n - 1)
    return min(k, n)


def stratified_split(dataset: Dataset, train_fraction: float = 0.9, seed: int = 42,
                     stratified: bool = True) -> tuple[Dataset, Dataset]:
    """Seeded train/validation partition.

    Each class is shuffled independently and its first ``round(f * n_c)``
    members go to train (kept in [1, n_c - 1] when n_c >= 2 so both sides see
    the class). Both parts keep the input's file order. With
    ``stratified=False`` the whole dataset is shuffled once instead.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ArgumentError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    rng = np.random.default_rng(seed)
    if stratified:
        labels = np.asarray(dataset.labels(), dtype=np.int64)
        train_idx: list[int] = []
        for c in range(dataset.scheme.num_classes):
            members = np.flatnonzero(labels == c)
            if members.size == 0:
                continue
            members = members[rng.permutation(members.size)]
            train_idx.extend(members[: _train_take(members.size, train_fraction)].tolist())
    else:
        order = rng.permutation(len(dataset))
        train_idx = order[: _train_take(len(dataset), train_fraction)].tolist()
    chosen = set(train_idx)
    train = sorted(chosen)
    valid = [i for i in range(len(dataset)) if i not in chosen]
    return dataset.subset(train), dataset.subset(valid)


def require_min_per_class(dataset: Dataset, minimum: int) -> None:
    counts = class_counts(dataset)
    thin = [dataset.scheme.classes[c] for c, n in counts.items() if n < minimum]
    if thin:
        raise DataError(
            f"classes with fewer than {minimum} examples: {', '.join(thin)}"
        )


def from_records(records: Sequence[tuple[str, str, str]], task="A", language: str = "") -> Dataset:
    """Build a Dataset from (id, text, label-name) triples; handy for synthetic corpora."""
    scheme = scheme_for(task)
    examples = []
    for tweet_id, text, name in records:
        lab = scheme.class_id(name)
        if scheme.task is Task.A:
            examples.append(LabeledExample(tweet_id, text, label_a=lab))
        else:
            examples.append(LabeledExample(tweet_id, text, label_b=lab))
    return Dataset(scheme, tuple(examples), language)
