"""JSON checkpoint: everything needed to re-encode text and rerun the classifier."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from .corpus import LabelScheme, scheme_for
from .errors import DataError, SchemaError
from .loss import ClassWeights
from .model import ModelConfig, ModelParams
from .textenc import Vocabulary

if TYPE_CHECKING:
    from .train import TrainConfig

FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    config: "TrainConfig"
    scheme: LabelScheme
    vocab: Vocabulary
    class_weights: ClassWeights
    max_len: int
    params: ModelParams
    best_epoch: int
    best_macro_f1: float
    format_version: int = FORMAT_VERSION

    def to_dict(self) -> dict:
        cfg = self.params.config
        return {
            "format_version": self.format_version,
            "task": self.scheme.task.value,
            "label_scheme": list(self.scheme.classes),
            "config": self.config.to_flat(),
            "vocabulary": list(self.vocab.tokens),
            "class_weights": {
                "scheme": self.class_weights.scheme.value,
                "weights": self.class_weights.weights.tolist(),
            },
            "max_len": self.max_len,
            "model": {
                "vocab_size": cfg.vocab_size, "embed_dim": cfg.embed_dim,
                "num_classes": cfg.num_classes, "encoder_kind": cfg.encoder_kind.value,
                "num_heads": cfg.num_heads, "ffn_dim": cfg.ffn_dim, "init_seed": cfg.init_seed,
            },
            "tensors": {
                name: {"shape": list(t.shape), "data": t.tolist()}
                for name, t in self.params.tensors.items()
            },
            "best_epoch": self.best_epoch,
            "best_macro_f1": self.best_macro_f1,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Checkpoint":
        from .train import TrainConfig

        version = doc.get("format_version")
        if version != FORMAT_VERSION:
            raise SchemaError(f"unsupported checkpoint format_version {version!r} (expected {FORMAT_VERSION})")
        try:
            scheme = scheme_for(doc["task"])
            if list(scheme.classes) != list(doc["label_scheme"]):
                raise SchemaError(f"label scheme {doc['label_scheme']} does not match task {doc['task']}")
            vocab = Vocabulary(tuple(doc["vocabulary"]))
            model_cfg = ModelConfig(**doc["model"])
            if model_cfg.vocab_size != len(vocab):
                raise SchemaError(
                    f"model vocab_size {model_cfg.vocab_size} != vocabulary length {len(vocab)}"
                )
            tensors = {}
            for name, entry in doc["tensors"].items():
                arr = np.array(entry["data"], dtype=np.float64).reshape(entry["shape"])
                tensors[name] = arr
            cw = doc["class_weights"]
            return cls(
                config=TrainConfig.from_flat(doc["config"], scheme.task),
                scheme=scheme,
                vocab=vocab,
                class_weights=ClassWeights(np.array(cw["weights"]), cw["scheme"]),
                max_len=int(doc["max_len"]),
                params=ModelParams(model_cfg, tensors),
                best_epoch=int(doc["best_epoch"]),
                best_macro_f1=float(doc["best_macro_f1"]),
                format_version=version,
            )
        except KeyError as exc:
            raise SchemaError(f"checkpoint missing field {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"malformed checkpoint: {exc}") from None

    def dumps(self) -> str:
        # json writes floats with repr(), the shortest string that round-trips exactly
        return json.dumps(self.to_dict(), indent=1, allow_nan=False) + "\n"

    def save(self, path) -> None:
        atomic_write_text(path, self.dumps())

    @classmethod
    def load(cls, path) -> "Checkpoint":
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise DataError(f"no such checkpoint: {path}") from None
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise SchemaError(f"{path}: not a JSON checkpoint ({exc})") from None
        return cls.from_dict(doc)


def atomic_write_text(path, text: str) -> None:
    """Write to a temp file in the target directory, fsync, then rename over the target."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
