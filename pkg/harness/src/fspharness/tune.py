"""MLM warmup plus classification tuning on generated shards.

The backbone is masked-LM pretrained on the same shard text (this sandbox has
no model hub), then tuned with cross-entropy over the option index. Validation
accuracy on the held-out split is the reported model-selection metric.
"""

from __future__ import annotations

import json
import logging
import random
import time
from dataclasses import dataclass, field
from pathlib import Path

import torch
import torch.nn.functional as F

from .data import EncodedExample, collate, encode_sample, iter_shard_records, sample_tokens
from .model import MaskedEncoder
from .vocab import MASK_ID, SPECIALS, Vocab

log = logging.getLogger("fspharness")


@dataclass
class HarnessConfig:
    model: str = "small"
    max_tokens: int = 512
    batch_size: int = 32
    learning_rate: float = 3e-4
    epochs: int = 1
    mlm_epochs: int = 1
    n_model: int = 20
    seed: int = 0
    mlm_fraction: float = 0.15


@dataclass
class TuneResult:
    checkpoint_dir: Path
    validation_accuracy: float
    n_tuning: int
    n_validation: int
    history: list = field(default_factory=list)


def _set_seeds(seed: int):
    random.seed(seed)
    torch.manual_seed(seed)


def _load_examples(paths, vocab: Vocab, cfg: HarnessConfig, prefix: str) -> list[EncodedExample]:
    examples = []
    for i, record in enumerate(iter_shard_records(paths)):
        if len(record["options"]) != cfg.n_model:
            raise ValueError(
                f"shard record has {len(record['options'])} options, "
                f"config expects n_model={cfg.n_model}"
            )
        examples.append(encode_sample(record, vocab, cfg.max_tokens, f"{prefix}-{i:06d}"))
    return examples


def _batches(examples, batch_size, rng: random.Random | None):
    order = list(range(len(examples)))
    if rng is not None:
        rng.shuffle(order)
    for start in range(0, len(order), batch_size):
        yield [examples[i] for i in order[start : start + batch_size]]


def _mask_tokens(ids: torch.Tensor, mask: torch.Tensor, vocab_size: int,
                 fraction: float, generator: torch.Generator):
    """BERT-style corruption: 80% [MASK], 10% random, 10% kept."""
    candidates = mask.bool() & (ids >= len(SPECIALS))
    scores = torch.rand(ids.shape, generator=generator)
    selected = candidates & (scores < fraction)
    targets = torch.where(selected, ids, torch.full_like(ids, -100))
    corrupted = ids.clone()
    roll = torch.rand(ids.shape, generator=generator)
    corrupted[selected & (roll < 0.8)] = MASK_ID
    random_ids = torch.randint(len(SPECIALS), vocab_size, ids.shape, generator=generator)
    swap = selected & (roll >= 0.8) & (roll < 0.9)
    corrupted[swap] = random_ids[swap]
    return corrupted, targets


def mlm_pretrain(model: MaskedEncoder, examples, cfg: HarnessConfig) -> list[float]:
    if cfg.mlm_epochs <= 0:
        return []
    generator = torch.Generator().manual_seed(cfg.seed + 1)
    rng = random.Random(cfg.seed + 2)
    steps = max(1, (len(examples) * cfg.mlm_epochs) // cfg.batch_size)
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate, weight_decay=0.01)
    scheduler = torch.optim.lr_scheduler.LambdaLR(
        optimizer, lambda s: min(1.0, (s + 1) / 20) * max(0.05, 1 - s / steps)
    )
    losses = []
    model.train()
    step = 0
    started = time.monotonic()
    for epoch in range(cfg.mlm_epochs):
        for batch in _batches(examples, cfg.batch_size, rng):
            ids, mask, _ = collate(batch)
            corrupted, targets = _mask_tokens(
                ids, mask, model.config["vocab_size"], cfg.mlm_fraction, generator
            )
            if (targets != -100).sum() == 0:
                continue
            logits = model.mlm_logits(corrupted, mask)
            loss = F.cross_entropy(logits.view(-1, logits.size(-1)), targets.view(-1))
            optimizer.zero_grad()
            loss.backward()
            torch.nn.utils.clip_grad_norm_(model.parameters(), 1.0)
            optimizer.step()
            scheduler.step()
            losses.append(loss.item())
            step += 1
            if step % 200 == 0:
                log.info("mlm step %d loss %.3f (%.0fs)", step, loss.item(),
                         time.monotonic() - started)
    return losses


def classification_tune(model: MaskedEncoder, examples, cfg: HarnessConfig) -> list[float]:
    rng = random.Random(cfg.seed + 3)
    steps = max(1, (len(examples) * cfg.epochs) // cfg.batch_size)
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate, weight_decay=0.01)
    scheduler = torch.optim.lr_scheduler.LambdaLR(
        optimizer, lambda s: min(1.0, (s + 1) / 20) * max(0.02, 1 - s / steps)
    )
    losses = []
    model.train()
    step = 0
    started = time.monotonic()
    for epoch in range(cfg.epochs):
        for batch in _batches(examples, cfg.batch_size, rng):
            ids, mask, labels = collate(batch)
            logits = model.cls_logits(ids, mask)
            loss = F.cross_entropy(logits, labels)
            optimizer.zero_grad()
            loss.backward()
            torch.nn.utils.clip_grad_norm_(model.parameters(), 1.0)
            optimizer.step()
            scheduler.step()
            losses.append(loss.item())
            step += 1
            if step % 200 == 0:
                log.info("tune step %d loss %.3f (%.0fs)", step, loss.item(),
                         time.monotonic() - started)
    return losses


@torch.no_grad()
def classification_accuracy(model: MaskedEncoder, examples, batch_size: int) -> float:
    if not examples:
        return 0.0
    model.eval()
    correct = 0
    for batch in _batches(examples, batch_size, rng=None):
        ids, mask, labels = collate(batch)
        predictions = model.cls_logits(ids, mask).argmax(dim=-1)
        correct += (predictions == labels).sum().item()
    return correct / len(examples)


def save_checkpoint(model: MaskedEncoder, vocab: Vocab, cfg: HarnessConfig,
                    directory: str | Path, extra: dict | None = None) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    torch.save(model.state_dict(), directory / "model.pt")
    vocab.save(directory / "vocab.json")
    payload = {"model": model.config, "harness": cfg.__dict__}
    if extra:
        payload.update(extra)
    (directory / "config.json").write_text(json.dumps(payload, indent=2) + "\n", "utf-8")
    return directory


def load_checkpoint(directory: str | Path) -> tuple[MaskedEncoder, Vocab, dict]:
    directory = Path(directory)
    payload = json.loads((directory / "config.json").read_text("utf-8"))
    vocab = Vocab.load(directory / "vocab.json")
    model = MaskedEncoder(**payload["model"])
    model.load_state_dict(torch.load(directory / "model.pt", weights_only=True))
    model.eval()
    return model, vocab, payload


def tune(
    tuning_paths,
    validation_paths,
    cfg: HarnessConfig,
    checkpoint_dir: str | Path,
) -> TuneResult:
    _set_seeds(cfg.seed)
    tuning_records = list(iter_shard_records(tuning_paths))
    if not tuning_records:
        raise ValueError("no tuning records found")
    vocab = Vocab.build(
        (sample_tokens(r) for r in tuning_records), n_model=cfg.n_model
    )
    log.info("vocab size %d from %d tuning records", len(vocab), len(tuning_records))

    examples = []
    for i, record in enumerate(tuning_records):
        if len(record["options"]) != cfg.n_model:
            raise ValueError(
                f"shard record has {len(record['options'])} options, "
                f"config expects n_model={cfg.n_model}"
            )
        examples.append(encode_sample(record, vocab, cfg.max_tokens, f"tune-{i:06d}"))
    del tuning_records
    validation = _load_examples(validation_paths, vocab, cfg, "val")

    model = MaskedEncoder.from_preset(
        cfg.model, vocab_size=len(vocab), n_model=cfg.n_model, max_len=cfg.max_tokens
    )
    log.info("model %s: %.1fM parameters", cfg.model, model.parameter_count() / 1e6)

    untrained_accuracy = classification_accuracy(model, validation, cfg.batch_size)
    mlm_losses = mlm_pretrain(model, examples, cfg)
    cls_losses = classification_tune(model, examples, cfg)
    validation_accuracy = classification_accuracy(model, validation, cfg.batch_size)
    log.info(
        "validation accuracy %.4f (untrained %.4f)", validation_accuracy, untrained_accuracy
    )

    extra = {
        "validation_accuracy": validation_accuracy,
        "untrained_validation_accuracy": untrained_accuracy,
        "n_tuning": len(examples),
        "n_validation": len(validation),
    }
    save_checkpoint(model, vocab, cfg, checkpoint_dir, extra=extra)
    return TuneResult(
        checkpoint_dir=Path(checkpoint_dir),
        validation_accuracy=validation_accuracy,
        n_tuning=len(examples),
        n_validation=len(validation),
        history=[("untrained_validation", untrained_accuracy),
                 ("mlm_final", mlm_losses[-1] if mlm_losses else None),
                 ("cls_final", cls_losses[-1] if cls_losses else None)],
    )
