"""Shard reading and sequence encoding for the harness.

Two input surfaces, both produced by the dataset CLI:
  * raw sample shards (options/label/text records) for tuning;
  * rendered shards (input/label strings) for zero-shot inference.

Encoding truncates from the text side only; the option block is never cut.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import torch

from .vocab import CLS, PAD_ID, SEP, Vocab, indicator_token, tokenize


class OverlongOptionsError(ValueError):
    """The option block alone exceeds the token budget."""


@dataclass
class EncodedExample:
    sample_id: str
    ids: torch.Tensor  # int32, unpadded
    label: int


def iter_shard_records(paths: Iterable[str | Path]) -> Iterator[dict]:
    for path in sorted(str(p) for p in paths):
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    yield json.loads(line)


def shard_paths(directory: str | Path, split: str) -> list[Path]:
    return sorted(Path(directory).glob(f"{split}-*.jsonl"))


def sample_tokens(record: dict) -> list[str]:
    """Token stream for one raw sample record, markers mapped to specials."""
    tokens = [CLS]
    for slot, option in enumerate(record["options"]):
        tokens.append(indicator_token(slot))
        tokens.extend(tokenize(option))
    tokens.append(SEP)
    tokens.extend(tokenize(record["text"]))
    tokens.append(SEP)
    return tokens


def encode_sample(
    record: dict, vocab: Vocab, max_tokens: int, sample_id: str
) -> EncodedExample:
    """Encode a raw sample record; text tokens beyond the budget are dropped."""
    head = [CLS]
    for slot, option in enumerate(record["options"]):
        head.append(indicator_token(slot))
        head.extend(tokenize(option))
    head.append(SEP)
    budget = max_tokens - len(head) - 1
    if budget < 0:
        raise OverlongOptionsError(
            f"{sample_id}: option block has {len(head)} tokens, budget {max_tokens}"
        )
    text_tokens = tokenize(record["text"])[:budget]
    ids = vocab.encode(head + text_tokens + [SEP])
    return EncodedExample(sample_id, torch.tensor(ids, dtype=torch.int32), int(record["label"]))


def encode_rendered(
    rendered: str, label: int, vocab: Vocab, max_tokens: int, sample_id: str
) -> EncodedExample:
    """Encode an already-rendered input string with text-side truncation."""
    tokens = tokenize(rendered)
    if not tokens or tokens[0] != CLS or tokens[-1] != SEP:
        raise ValueError(f"{sample_id}: rendered input lacks the expected markers")
    first_sep = tokens.index(SEP)
    head = tokens[: first_sep + 1]
    budget = max_tokens - len(head) - 1
    if budget < 0:
        raise OverlongOptionsError(
            f"{sample_id}: option block has {len(head)} tokens, budget {max_tokens}"
        )
    text_tokens = tokens[first_sep + 1 : -1][:budget]
    ids = vocab.encode(head + text_tokens + [SEP])
    return EncodedExample(sample_id, torch.tensor(ids, dtype=torch.int32), int(label))


def collate(examples: list[EncodedExample]) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """Pad a batch to its longest sequence; mask is 1 on real tokens."""
    width = max(len(e.ids) for e in examples)
    ids = torch.full((len(examples), width), PAD_ID, dtype=torch.long)
    mask = torch.zeros((len(examples), width), dtype=torch.long)
    for row, example in enumerate(examples):
        n = len(example.ids)
        ids[row, :n] = example.ids.long()
        mask[row, :n] = 1
    labels = torch.tensor([e.label for e in examples], dtype=torch.long)
    return ids, mask, labels
