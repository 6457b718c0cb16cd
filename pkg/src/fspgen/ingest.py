"""Read raw corpora into a normalized article stream.

Two input shapes are supported, both line-delimited JSON:

  * article corpus: ``{"id": ..., "title": ..., "paragraphs": [...]}``
    (title optional) — articles keep at most the first N paragraphs.
  * flat corpus: ``{"category": ..., "text": ...}`` — every record becomes a
    one-paragraph article, capped per category.

Malformed records are reported through an ``on_error`` callback (default:
log a warning) and skipped; the stream keeps going. Unreadable files raise.
"""

from __future__ import annotations

import json
import logging
import random
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .seeding import derive_seed

log = logging.getLogger(__name__)

ARTICLE_CORPUS = "article_corpus"
FLAT_CORPUS = "flat_corpus"

# on_error(line_number, message)
ErrorCallback = Callable[[int, str], None]


@dataclass
class Article:
    article_id: str
    source: str
    paragraphs: list[str]
    category: str | None = None


@dataclass
class IngestConfig:
    max_paragraphs_per_article: int = 5
    max_samples_per_category: int = 500_000
    per_corpus_quota: int | None = None

    def __post_init__(self):
        if self.max_paragraphs_per_article < 1:
            raise ValueError("max_paragraphs_per_article must be >= 1")
        if self.max_samples_per_category < 1:
            raise ValueError("max_samples_per_category must be >= 1")
        if self.per_corpus_quota is not None and self.per_corpus_quota < 1:
            raise ValueError("per_corpus_quota must be >= 1 when set")


def _default_on_error(line_no: int, message: str) -> None:
    log.warning("line %d: %s", line_no, message)


def _iter_records(path: Path, on_error: ErrorCallback) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                on_error(line_no, f"invalid JSON: {exc}")
                continue
            if not isinstance(record, dict):
                on_error(line_no, "record is not an object")
                continue
            yield line_no, record


def read_article_corpus(
    path: str | Path,
    cfg: IngestConfig,
    on_error: ErrorCallback | None = None,
) -> Iterator[Article]:
    """Yield articles in file order, keeping the first N paragraphs of each."""
    path = Path(path)
    on_error = on_error or _default_on_error
    seen_ids: set[str] = set()
    for line_no, record in _iter_records(path, on_error):
        article_id = record.get("id")
        paragraphs = record.get("paragraphs")
        if not isinstance(article_id, str) or not article_id:
            on_error(line_no, "missing or invalid 'id' field")
            continue
        if article_id in seen_ids:
            on_error(line_no, f"duplicate article id {article_id!r}")
            continue
        if not isinstance(paragraphs, list):
            on_error(line_no, "missing or invalid 'paragraphs' field")
            continue
        texts = [p.strip() for p in paragraphs if isinstance(p, str) and p.strip()]
        if not texts:
            on_error(line_no, "empty paragraph list")
            continue
        seen_ids.add(article_id)
        yield Article(
            article_id=article_id,
            source=ARTICLE_CORPUS,
            paragraphs=texts[: cfg.max_paragraphs_per_article],
        )


def read_flat_corpus(
    path: str | Path,
    cfg: IngestConfig,
    on_error: ErrorCallback | None = None,
) -> Iterator[Article]:
    """Yield one-paragraph articles, dropping records past the per-category cap."""
    path = Path(path)
    on_error = on_error or _default_on_error
    per_category: Counter[str] = Counter()
    for line_no, record in _iter_records(path, on_error):
        category = record.get("category")
        text = record.get("text")
        if not isinstance(category, str) or not category:
            on_error(line_no, "missing or invalid 'category' field")
            continue
        if not isinstance(text, str) or not text.strip():
            on_error(line_no, "missing or invalid 'text' field")
            continue
        if per_category[category] >= cfg.max_samples_per_category:
            continue
        per_category[category] += 1
        yield Article(
            article_id=f"{path.stem}-{line_no:08d}",
            source=FLAT_CORPUS,
            paragraphs=[text.strip()],
            category=category,
        )


def _reservoir(stream: Iterable[Article], quota: int | None, rng: random.Random) -> list[Article]:
    if quota is None:
        return list(stream)
    sample: list[Article] = []
    seen = 0
    for article in stream:
        seen += 1
        if len(sample) < quota:
            sample.append(article)
        else:
            j = rng.randrange(seen)
            if j < quota:
                sample[j] = article
    return sample


def interleave(
    corpora: list[Iterable[Article]],
    quotas: list[int | None],
    seed: int,
) -> Iterator[Article]:
    """Draw quota[i] articles from stream i and emit them in a seeded shuffle.

    Streams larger than their quota are sampled with a uniform reservoir; streams
    that run short emit everything they have, with a warning.
    """
    if len(corpora) != len(quotas):
        raise ValueError("one quota per corpus stream required")
    pooled: list[Article] = []
    for i, (stream, quota) in enumerate(zip(corpora, quotas)):
        rng = random.Random(derive_seed(seed, "reservoir", i))
        sample = _reservoir(stream, quota, rng)
        if quota is not None and len(sample) < quota:
            log.warning(
                "corpus %d exhausted at %d articles (quota %d)", i, len(sample), quota
            )
        pooled.extend(sample)
    random.Random(derive_seed(seed, "interleave")).shuffle(pooled)
    yield from pooled
