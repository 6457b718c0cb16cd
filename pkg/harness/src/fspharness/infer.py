"""Score rendered task shards with a tuned checkpoint and emit logits files."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import torch

from .data import collate, encode_rendered
from .model import MaskedEncoder
from .tune import load_checkpoint
from .vocab import Vocab

log = logging.getLogger("fspharness")


def read_rendered(path: str | Path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


@torch.no_grad()
def score_rendered(
    model: MaskedEncoder,
    vocab: Vocab,
    records: list[dict],
    max_tokens: int,
    batch_size: int = 64,
) -> list[dict]:
    """One logits row per rendered record, in input order."""
    model.eval()
    examples = [
        encode_rendered(r["input"], r["label"], vocab, max_tokens, f"line-{i:06d}")
        for i, r in enumerate(records)
    ]
    rows = []
    for start in range(0, len(examples), batch_size):
        batch = examples[start : start + batch_size]
        ids, mask, labels = collate(batch)
        logits = model.cls_logits(ids, mask)
        for example, row, label in zip(batch, logits, labels):
            rows.append(
                {
                    "sample_id": example.sample_id,
                    "logits": [float(x) for x in row],
                    "gold_label": int(label),
                }
            )
    return rows


def write_logits(rows: list[dict], path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    return path


def infer(checkpoint_dir: str | Path, rendered_path: str | Path,
          out_path: str | Path, batch_size: int = 64) -> list[dict]:
    model, vocab, payload = load_checkpoint(checkpoint_dir)
    max_tokens = payload["harness"]["max_tokens"]
    records = read_rendered(rendered_path)
    rows = score_rendered(model, vocab, records, max_tokens, batch_size)
    write_logits(rows, out_path)
    log.info("wrote %d logits rows to %s", len(rows), out_path)
    return rows


def constrained_accuracy(rows: list[dict], n_l: int) -> float:
    """Harness-side accuracy with the same prefix-argmax rule the evaluator uses."""
    if not rows:
        raise ValueError("no logits rows to score")
    correct = 0
    for row in rows:
        prefix = row["logits"][:n_l]
        prediction = max(range(n_l), key=lambda i: (prefix[i], -i))
        if prediction == row["gold_label"]:
            correct += 1
    return correct / len(rows)
