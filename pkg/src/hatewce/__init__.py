"""Class-weighted cross-entropy text classification for HASOC-style hate speech data."""

from .corpus import (
    SCHEME_A, SCHEME_B, Dataset, LabeledExample, LabelScheme, Task, class_counts, load_dataset,
    stratified_split,
)
from .loss import ClassWeights, batch_loss, compute_class_weights, weighted_ce, weighted_ce_grad
from .metrics import Metrics, compute_metrics, confusion, macro_f1
from .model import ModelConfig, ModelParams, backward, forward, init_params, predict
from .optim import OptimHyper, OptimizerState, adamw_step
from .textenc import EncodedBatch, Vocabulary, build_vocab, encode_batch, select_max_len, tokenize
from .train import TrainConfig, TrainReport, evaluate, train

__version__ = "0.1.0"

__all__ = [
    "SCHEME_A", "SCHEME_B", "ClassWeights", "Dataset", "EncodedBatch", "LabelScheme",
    "LabeledExample", "Metrics", "ModelConfig", "ModelParams", "OptimHyper", "OptimizerState",
    "Task", "TrainConfig", "TrainReport", "Vocabulary", "adamw_step", "backward", "batch_loss",
    "build_vocab", "class_counts", "compute_class_weights", "compute_metrics", "confusion",
    "encode_batch", "evaluate", "forward", "init_params", "load_dataset", "macro_f1", "predict",
    "select_max_len", "stratified_split", "tokenize", "train", "weighted_ce", "weighted_ce_grad",
]
