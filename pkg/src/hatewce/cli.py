"""Command-line entry point: ``hatewce stats|train|predict|evaluate``.

Exit codes: 0 success, 2 usage/config error, 3 data/schema error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .checkpoint import Checkpoint, atomic_write_text
from .corpus import Task, class_counts, load_dataset, load_texts
from .errors import ConfigError, DataError, HatewceError, SchemaError
from .loss import compute_class_weights
from .train import TrainConfig, evaluate, predict_examples, train


def _ratio_string(counts: list[int]) -> str:
    smallest = min(c for c in counts if c > 0) if any(counts) else 1
    parts = []
    for c in counts:
        r = c / smallest
        parts.append("1" if r == 1 else f"{r:.2f}")
    return ":".join(parts)


def cmd_stats(args) -> int:
    ds = load_dataset(args.data, args.delimiter, args.task)
    if len(ds) == 0:
        raise DataError(f"{args.data}: no data rows")
    counts = class_counts(ds)
    names = ds.scheme.classes
    n = len(ds)
    print(f"task {ds.task.value}  examples {n}")
    try:
        weights = compute_class_weights(counts, "inverse_frequency_normalized", names).weights
    except DataError:
        weights = None
    for c, name in enumerate(names):
        line = f"{name:<5} {counts[c]:>7} {counts[c] / n:8.2%}"
        if weights is not None:
            line += f"  weight {weights[c]:.6f}"
        print(line)
    print(f"ratio {':'.join(names)} = {_ratio_string([counts[c] for c in range(len(names))])}")
    if weights is None:
        print("weight inverse_frequency_normalized undefined: some class has no examples")
    return 0


def _read_config(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"no such config file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return doc


def cmd_train(args) -> int:
    config = TrainConfig.from_flat(_read_config(args.config), args.task, require_all=True)
    ds = load_dataset(args.data, args.delimiter, args.task)
    out = Path(args.output)
    lines: list[str] = []

    def log(msg: str) -> None:
        lines.append(msg)
        print(msg, flush=True)

    ckpt, _ = train(ds, config, log=log)
    ckpt.save(out)
    atomic_write_text(out.with_name(out.name + ".log"), "\n".join(lines) + "\n")
    return 0


def cmd_predict(args) -> int:
    ckpt = Checkpoint.load(args.model)
    if args.task is not None and Task(args.task) is not ckpt.scheme.task:
        raise SchemaError(
            f"checkpoint predicts task {ckpt.scheme.task.value}, request asked for task {args.task}"
        )
    examples = load_texts(args.input, args.delimiter)
    preds = predict_examples(ckpt, examples)
    rows = ["tweet_id\tlabel"]
    rows += [f"{ex.id}\t{ckpt.scheme.classes[p]}" for ex, p in zip(examples, preds)]
    atomic_write_text(args.output, "\n".join(rows) + "\n")
    return 0


def evaluation_report(ckpt: Checkpoint, metrics) -> dict:
    body = metrics.to_dict(list(ckpt.scheme.classes))
    return {"task": ckpt.scheme.task.value, "n": body["n"], "macro_f1": body["macro_f1"],
            "per_class": body["per_class"], "confusion": body["confusion"]}


def cmd_evaluate(args) -> int:
    ckpt = Checkpoint.load(args.model)
    if args.task is not None and Task(args.task) is not ckpt.scheme.task:
        raise SchemaError(
            f"checkpoint is for task {ckpt.scheme.task.value}, request asked for task {args.task}"
        )
    ds = load_dataset(args.data, args.delimiter, ckpt.scheme.task)
    metrics = evaluate(ckpt, ds)
    names = ckpt.scheme.classes
    width = max(len(n) for n in names) + 1
    print("confusion (rows = truth, cols = prediction)")
    print(" " * width + " ".join(f"{n:>6}" for n in names))
    for name, row in zip(names, metrics.confusion):
        print(f"{name:<{width}}" + " ".join(f"{v:>6d}" for v in row))
    print(f"{'class':<{width}} precision    recall        f1")
    for name, s in zip(names, metrics.per_class):
        print(f"{name:<{width}} {s.precision:9.6f} {s.recall:9.6f} {s.f1:9.6f}")
    print(f"macro_f1 {metrics.macro_f1:.6f}")
    if args.output:
        report = evaluation_report(ckpt, metrics)
        atomic_write_text(args.output, json.dumps(report, indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hatewce", description="Class-weighted tweet classifier: stats, train, predict, evaluate."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def delimiter(p):
        p.add_argument("--delimiter", choices=["tab", "comma"], default="tab")

    p = sub.add_parser("stats", help="class distribution and inverse-frequency weights")
    p.add_argument("--data", required=True)
    p.add_argument("--task", choices=["A", "B"], required=True)
    delimiter(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("train", help="train and save the best-validation checkpoint")
    p.add_argument("--data", required=True)
    p.add_argument("--task", choices=["A", "B"], required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--output", required=True, help="checkpoint path; the run log goes to <output>.log")
    delimiter(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="label an unlabeled tweet_id/text file")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--task", choices=["A", "B"], default=None)
    delimiter(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score a checkpoint on labeled data")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--output", default=None, help="write the JSON report here")
    p.add_argument("--task", choices=["A", "B"], default=None)
    delimiter(p)
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HatewceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DataError.exit_code


if __name__ == "__main__":
    sys.exit(main())
