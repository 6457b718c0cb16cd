"""Harness CLI: synthesize fixture corpora, tune the toy model, score inputs."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import infer as infer_mod
from . import synth
from .data import shard_paths
from .tune import HarnessConfig, tune

log = logging.getLogger("fspharness")


def cmd_make_corpus(args) -> int:
    paths = synth.make_corpus(
        args.output_dir,
        n_articles=args.articles,
        n_reviews=args.reviews,
        eval_size=args.eval_size,
        seed=args.seed,
    )
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def cmd_tune(args) -> int:
    cfg = HarnessConfig(
        model=args.model,
        max_tokens=args.max_tokens,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        mlm_epochs=args.mlm_epochs,
        n_model=args.n_model,
        seed=args.seed,
    )
    tuning = shard_paths(args.shards, "tuning")
    validation = shard_paths(args.shards, "validation")
    if not tuning:
        log.error("no tuning shards under %s", args.shards)
        return 2
    result = tune(tuning, validation, cfg, args.output_dir)
    print(
        json.dumps(
            {
                "checkpoint": str(result.checkpoint_dir),
                "validation_accuracy": result.validation_accuracy,
                "n_tuning": result.n_tuning,
                "n_validation": result.n_validation,
            }
        )
    )
    return 0


def cmd_infer(args) -> int:
    rows = infer_mod.infer(args.checkpoint, args.rendered, args.output, args.batch_size)
    if args.n_l:
        accuracy = infer_mod.constrained_accuracy(rows, args.n_l)
        print(json.dumps({"n": len(rows), "accuracy": accuracy}))
    else:
        print(json.dumps({"n": len(rows)}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fsp-harness")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    mk = sub.add_parser("make-corpus", help="write synthetic fixture corpora")
    mk.add_argument("--output-dir", "-o", required=True)
    mk.add_argument("--articles", type=int, default=7000)
    mk.add_argument("--reviews", type=int, default=30_000)
    mk.add_argument("--eval-size", type=int, default=500)
    mk.add_argument("--seed", type=int, default=17)
    mk.set_defaults(func=cmd_make_corpus)

    tn = sub.add_parser("tune", help="MLM-pretrain and tune on generated shards")
    tn.add_argument("--shards", required=True, help="directory with tuning-*/validation-*.jsonl")
    tn.add_argument("--output-dir", "-o", required=True, help="checkpoint directory")
    tn.add_argument("--model", default="small", help="preset: tiny, small, base")
    tn.add_argument("--max-tokens", type=int, default=512)
    tn.add_argument("--batch-size", type=int, default=32)
    tn.add_argument("--learning-rate", type=float, default=3e-4)
    tn.add_argument("--epochs", type=int, default=1)
    tn.add_argument("--mlm-epochs", type=int, default=1)
    tn.add_argument("--n-model", type=int, default=20)
    tn.add_argument("--seed", type=int, default=0)
    tn.set_defaults(func=cmd_tune)

    inf = sub.add_parser("infer", help="score a rendered shard into a logits file")
    inf.add_argument("--checkpoint", required=True)
    inf.add_argument("--rendered", required=True)
    inf.add_argument("--output", "-o", required=True)
    inf.add_argument("--batch-size", type=int, default=64)
    inf.add_argument("--n-l", type=int, help="also print constrained accuracy")
    inf.set_defaults(func=cmd_infer)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ValueError as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
