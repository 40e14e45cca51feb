"""Training protocol: split, fit vocabulary/weights/length on train, AdamW epochs,
keep the parameters from the epoch with the best validation macro F1."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Mapping, Sequence

import numpy as np

from .checkpoint import Checkpoint
from .corpus import Dataset, LabeledExample, Task, class_counts, require_min_per_class, stratified_split
from .errors import ConfigError, DataError, NumericError, SchemaError
from .loss import WeightScheme, batch_loss, compute_class_weights
from .metrics import Metrics, compute_metrics
from .model import EncoderKind, ModelConfig, backward, forward, init_params, predict
from .optim import OptimHyper, OptimizerState, adamw_step
from .textenc import EncodedBatch, build_vocab, encode_batch, select_max_len, tokenize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    task: Task = Task.A
    seed: int = 42
    train_fraction: float = 0.9
    batch_size: int = 8
    epochs: int = 4
    optimizer: OptimHyper = field(default_factory=OptimHyper)
    weight_scheme: WeightScheme = WeightScheme.INVERSE_FREQUENCY_NORMALIZED
    lowercase: bool = True
    min_token_freq: int = 2
    max_len_percentile: float = 99
    max_len: int | None = None
    embed_dim: int = 32
    encoder: EncoderKind = EncoderKind.BAG
    num_heads: int = 2
    ffn_dim: int = 64
    split: str = "stratified"

    def __post_init__(self):
        object.__setattr__(self, "task", Task(self.task))
        object.__setattr__(self, "weight_scheme", WeightScheme(self.weight_scheme))
        object.__setattr__(self, "encoder", EncoderKind(self.encoder))
        # floats stay floats so a saved config serializes identically after reload
        object.__setattr__(self, "train_fraction", float(self.train_fraction))
        object.__setattr__(self, "max_len_percentile", float(self.max_len_percentile))
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if not 0 < self.train_fraction < 1:
            raise ConfigError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")
        if self.max_len is not None and self.max_len < 1:
            raise ConfigError(f"max_len must be >= 1 or null, got {self.max_len}")
        if self.split not in ("stratified", "uniform"):
            raise ConfigError(f"split must be 'stratified' or 'uniform', got {self.split!r}")

    def to_flat(self) -> dict:
        """The flat key/value form used by config files and checkpoints."""
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "optimizer":
                out.update(asdict(value))
            elif f.name == "task":
                continue
            else:
                out[f.name] = value.value if hasattr(value, "value") else value
        return out

    @classmethod
    def from_flat(cls, doc: Mapping, task, require_all: bool = False) -> "TrainConfig":
        defaults = cls(task=task).to_flat()
        known = set(defaults)
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        if require_all:
            for key in CONFIG_KEYS:
                if key not in doc:
                    raise ConfigError(
                        f"missing config key {key!r} (default would be {defaults[key]!r})"
                    )
        merged = {**defaults, **doc}
        opt_keys = {f.name for f in fields(OptimHyper)}
        try:
            hyper = OptimHyper(**{k: float(merged[k]) for k in opt_keys})
            rest = {k: v for k, v in merged.items() if k not in opt_keys}
            for key in _INT_KEYS:
                if rest[key] is not None:
                    rest[key] = _as_int(key, rest[key])
            for key in ("train_fraction", "max_len_percentile"):
                rest[key] = float(rest[key])
            if not isinstance(rest["lowercase"], bool):
                raise ConfigError(f"lowercase must be true or false, got {rest['lowercase']!r}")
            return cls(task=task, optimizer=hyper, **rest)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad config value: {exc}") from None


_INT_KEYS = ("seed", "batch_size", "epochs", "min_token_freq", "max_len", "embed_dim",
             "num_heads", "ffn_dim")


def _as_int(key, value) -> int:
    if isinstance(value, bool) or not float(value).is_integer():
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return int(value)


# keys a config document must spell out; `split` is an optional extension
CONFIG_KEYS = (
    "seed", "train_fraction", "batch_size", "epochs", "lr", "beta1", "beta2", "eps",
    "weight_decay", "weight_scheme", "lowercase", "min_token_freq", "max_len_percentile",
    "max_len", "embed_dim", "encoder", "num_heads", "ffn_dim",
)


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    validation: Metrics


@dataclass
class TrainReport:
    epochs: list[EpochRecord]
    best_epoch: int
    best_macro_f1: float


def _epoch_order(n: int, seed: int, epoch: int) -> np.ndarray:
    # counter-based stream keyed on (seed, epoch): independent of anything consumed before
    bitgen = np.random.Philox(np.random.SeedSequence([seed, epoch]))
    return np.random.Generator(bitgen).permutation(n)


def _token_lengths(examples: Sequence[LabeledExample], lowercase: bool) -> list[int]:
    return [max(1, len(tokenize(ex.text, lowercase))) for ex in examples]


def _forward_predict(params, batch: EncodedBatch, batch_size: int) -> np.ndarray:
    preds = [predict(forward(params, batch.rows(i, i + batch_size))[0])
             for i in range(0, len(batch), batch_size)]
    return np.concatenate(preds) if preds else np.zeros(0, dtype=np.int64)


def train(dataset: Dataset, config: TrainConfig,
          log: Callable[[str], None] | None = None) -> tuple[Checkpoint, TrainReport]:
    """Run the full protocol and return the best-epoch checkpoint with its report."""
    emit = log or logger.info
    if dataset.task is not config.task:
        raise SchemaError(f"dataset is labeled for task {dataset.task.value}, config wants {config.task.value}")
    require_min_per_class(dataset, 2)
    scheme = dataset.scheme

    train_set, valid_set = stratified_split(dataset, config.train_fraction, config.seed,
                                            stratified=config.split == "stratified")
    vocab = build_vocab((tokenize(ex.text, config.lowercase) for ex in train_set),
                        config.min_token_freq)
    weights = compute_class_weights(class_counts(train_set), config.weight_scheme, scheme.classes)
    if config.max_len is not None:
        max_len = config.max_len
    else:
        max_len = select_max_len(_token_lengths(train_set.examples, config.lowercase),
                                 config.max_len_percentile)

    model_cfg = ModelConfig(
        vocab_size=len(vocab), embed_dim=config.embed_dim, num_classes=scheme.num_classes,
        encoder_kind=config.encoder, num_heads=config.num_heads, ffn_dim=config.ffn_dim,
        init_seed=config.seed,
    )
    params = init_params(model_cfg)
    state = OptimizerState.zeros_like(params)
    hyper = config.optimizer

    emit(f"split train={len(train_set)} valid={len(valid_set)} vocab={len(vocab)} max_len={max_len}")
    emit(f"weights scheme={weights.scheme.value} "
         + " ".join(f"{name}={w:.6f}" for name, w in zip(scheme.classes, weights.weights)))
    emit(f"optimizer adamw lr={hyper.lr:g} beta1={hyper.beta1:g} beta2={hyper.beta2:g} "
         f"eps={hyper.eps:g} weight_decay={hyper.weight_decay:g}")

    train_enc = encode_batch(train_set.examples, vocab, max_len, config.lowercase, config.task)
    valid_enc = encode_batch(valid_set.examples, vocab, max_len, config.lowercase, config.task)

    records: list[EpochRecord] = []
    best_epoch, best_f1, best_params = 0, -1.0, None
    for epoch in range(1, config.epochs + 1):
        order = _epoch_order(len(train_enc), config.seed, epoch)
        total = 0.0
        for b, start in enumerate(range(0, len(order), config.batch_size), start=1):
            batch = train_enc.take(order[start:start + config.batch_size])
            try:
                logits, cache = forward(params, batch)
                loss, dlogits = batch_loss(logits, batch.labels, weights)
                grads = backward(params, cache, dlogits)
                params, state = adamw_step(params, grads, state, hyper)
            except NumericError as exc:
                raise NumericError(f"epoch {epoch} batch {b}: {exc}") from None
            total += loss * len(batch)
        train_loss = total / len(order)
        preds = _forward_predict(params, valid_enc, config.batch_size)
        val = compute_metrics(valid_enc.labels, preds, scheme.num_classes)
        records.append(EpochRecord(epoch, train_loss, val))
        emit(f"epoch {epoch} train_loss {train_loss:.6f} val_macro_f1 {val.macro_f1:.6f}")
        if val.macro_f1 > best_f1:
            best_epoch, best_f1, best_params = epoch, val.macro_f1, params.copy()

    emit(f"best_epoch {best_epoch} best_macro_f1 {best_f1:.6f}")
    ckpt = Checkpoint(
        config=config, scheme=scheme, vocab=vocab, class_weights=weights, max_len=max_len,
        params=best_params, best_epoch=best_epoch, best_macro_f1=best_f1,
    )
    return ckpt, TrainReport(records, best_epoch, best_f1)


def predict_examples(checkpoint: Checkpoint, examples: Sequence[LabeledExample],
                     batch_size: int = 8) -> np.ndarray:
    if not len(examples):
        return np.zeros(0, dtype=np.int64)
    enc = encode_batch(examples, checkpoint.vocab, checkpoint.max_len, checkpoint.config.lowercase)
    return _forward_predict(checkpoint.params, enc, batch_size)


def evaluate(checkpoint: Checkpoint, dataset: Dataset, batch_size: int = 8) -> Metrics:
    """Forward-only scoring of a labeled dataset; batch size does not change the result."""
    if dataset.task is not checkpoint.scheme.task:
        raise SchemaError(
            f"checkpoint is for task {checkpoint.scheme.task.value}, dataset for {dataset.task.value}"
        )
    if len(dataset) == 0:
        raise DataError("cannot evaluate on an empty dataset")
    truth = dataset.labels()
    preds = predict_examples(checkpoint, dataset.examples, batch_size)
    return compute_metrics(truth, preds, checkpoint.scheme.num_classes)
