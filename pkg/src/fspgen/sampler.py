"""Construct self-supervised multiple-choice samples from an article stream.

One sample per kept paragraph: the objective-designated sentence becomes the
positive option, J sentences from other paragraphs become negatives (some from
the same article, the "hard" ones), pad markers fill the option list up to the
model width, and a seeded shuffle fixes the label. Per-sample RNGs are derived
from (seed, article_id, paragraph_index), so output is independent of stream
order and worker count.
"""

from __future__ import annotations

import multiprocessing
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .ingest import Article
from .seeding import derive_seed, unit_interval
from .segment import DedupIndex, ParagraphRecord, filter_paragraph, split_sentences

PAD_OPTION = "[PAD]"

FSP = "fsp"
LSP = "lsp"
NSS = "nss"
RSP = "rsp"
OBJECTIVES = (FSP, LSP, NSS, RSP)

TUNING = "tuning"
VALIDATION = "validation"


class InsufficientPoolError(RuntimeError):
    """Raised when the option pool cannot supply the requested negatives."""


@dataclass
class SamplerConfig:
    n_model: int = 20
    n_max_label: int = 10
    hard_negatives: int = 1
    seed: int = 0
    objective: str = FSP
    validation_fraction: float = 0.0

    def __post_init__(self):
        if self.n_model < 1 or self.n_max_label < 1:
            raise ValueError("n_model and n_max_label must be positive")
        if self.n_max_label > self.n_model:
            raise ValueError("n_max_label must not exceed n_model")
        if self.n_max_label < 2:
            raise ValueError("n_max_label must be >= 2 so that J >= 1 is possible")
        if self.hard_negatives < 0:
            raise ValueError("hard_negatives must be >= 0")
        if self.hard_negatives > self.n_max_label - 1:
            raise ValueError("hard_negatives must not exceed n_max_label - 1")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {self.objective!r}")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in [0, 1)")


@dataclass
class FspSample:
    options: list[str]
    label: int
    text: str
    positive_source: tuple[str, int]
    negative_sources: list[tuple[str, int]]
    is_hard: list[bool]
    source: str | None = None
    category: str | None = None

    @property
    def j_count(self) -> int:
        return len(self.negative_sources)


class OptionPool:
    """Candidate option sentences from kept paragraphs, indexed by article."""

    def __init__(self):
        self.by_article: dict[str, list[tuple[int, str]]] = {}
        self.entries: list[tuple[str, int, str]] = []

    def add(self, article_id: str, paragraph_index: int, sentence: str) -> None:
        self.by_article.setdefault(article_id, []).append((paragraph_index, sentence))
        self.entries.append((article_id, paragraph_index, sentence))

    def freeze(self) -> None:
        """Canonicalize entry order so draws ignore the ingestion order."""
        self.entries.sort()
        for candidates in self.by_article.values():
            candidates.sort()

    def __len__(self) -> int:
        return len(self.entries)


def designated_split(
    rec: ParagraphRecord, objective: str, rng: random.Random
) -> tuple[str, str]:
    """Pick the positive option and the remaining text for the given objective."""
    sentences = rec.sentences
    if len(sentences) < 2:
        raise ValueError(
            f"paragraph {rec.article_id}:{rec.paragraph_index} has fewer than 2 sentences"
        )
    if objective == FSP:
        return sentences[0], " ".join(sentences[1:])
    if objective == LSP:
        return sentences[-1], " ".join(sentences[:-1])
    if objective == NSS:
        i = rng.randrange(len(sentences) - 1)
        return sentences[i + 1], sentences[i]
    if objective == RSP:
        i = rng.randrange(len(sentences))
        rest = sentences[:i] + sentences[i + 1 :]
        return sentences[i], " ".join(rest)
    raise ValueError(f"unknown objective {objective!r}")


def sample_negatives(
    pool: OptionPool,
    positive_source: tuple[str, int],
    cfg: SamplerConfig,
    rng: random.Random,
    positive_option: str | None = None,
) -> list[tuple[str, tuple[str, int], bool]]:
    """Draw J negatives: hard ones from the positive's article first, the rest global.

    Returns (sentence, (article_id, paragraph_index), is_hard) triples, hard first.
    Raises InsufficientPoolError when the global pool cannot cover the draw.
    """
    article_id, paragraph_index = positive_source
    own = pool.by_article.get(article_id, [])
    if positive_option is None:
        positive_option = next(
            (s for idx, s in own if idx == paragraph_index), None
        )

    j_count = rng.randint(1, cfg.n_max_label - 1)

    hard_candidates = [
        (idx, sent)
        for idx, sent in own
        if idx != paragraph_index and sent != positive_option
    ]
    n_hard = min(cfg.hard_negatives, len(hard_candidates), j_count)
    picks: list[tuple[str, tuple[str, int], bool]] = []
    if n_hard:
        for idx, sent in rng.sample(hard_candidates, n_hard):
            picks.append((sent, (article_id, idx), True))

    n_random = j_count - n_hard
    if n_random:
        picks.extend(_draw_global(pool, article_id, positive_option, n_random, rng))
    return picks


def _draw_global(
    pool: OptionPool,
    exclude_article: str,
    positive_option: str | None,
    count: int,
    rng: random.Random,
) -> list[tuple[str, tuple[str, int], bool]]:
    """Uniform draw without replacement from the pool, excluding one article."""
    total = len(pool.entries)
    available = total - len(pool.by_article.get(exclude_article, []))
    if count > available:
        raise InsufficientPoolError(
            f"need {count} negatives outside article {exclude_article!r}, "
            f"pool has {available}"
        )
    picks: list[tuple[str, tuple[str, int], bool]] = []
    chosen: set[int] = set()
    misses = 0
    while len(picks) < count:
        k = rng.randrange(total)
        aid, pidx, sent = pool.entries[k]
        if k in chosen or aid == exclude_article or sent == positive_option:
            misses += 1
            if misses > 100 * count + 100:
                # Pathological pool (mostly excluded entries): fall back to an
                # explicit candidate list so the draw still terminates.
                remaining = [
                    (i, e)
                    for i, e in enumerate(pool.entries)
                    if i not in chosen
                    and e[0] != exclude_article
                    and e[2] != positive_option
                ]
                if len(remaining) < count - len(picks):
                    raise InsufficientPoolError(
                        f"pool exhausted while drawing negatives outside "
                        f"article {exclude_article!r}"
                    )
                for i, (aid2, pidx2, sent2) in rng.sample(
                    remaining, count - len(picks)
                ):
                    chosen.add(i)
                    picks.append((sent2, (aid2, pidx2), False))
                break
            continue
        chosen.add(k)
        picks.append((sent, (aid, pidx), False))
    return picks


def assemble(
    option: str,
    text: str,
    negatives: list[tuple[str, tuple[str, int], bool]],
    cfg: SamplerConfig,
    rng: random.Random,
    positive_source: tuple[str, int],
    source: str | None = None,
    category: str | None = None,
) -> FspSample:
    """Pad, shuffle, and label one sample."""
    j_count = len(negatives)
    if j_count + 1 > cfg.n_model:
        raise ValueError("too many options for n_model")
    slots = [option] + [sent for sent, _, _ in negatives]
    slots += [PAD_OPTION] * (cfg.n_model - j_count - 1)
    order = list(range(cfg.n_model))
    rng.shuffle(order)
    options = [slots[k] for k in order]
    label = order.index(0)
    return FspSample(
        options=options,
        label=label,
        text=text,
        positive_source=positive_source,
        negative_sources=[src for _, src, _ in negatives],
        is_hard=[hard for _, _, hard in negatives],
        source=source,
        category=category,
    )


def assign_split(article_id: str, validation_fraction: float, seed: int) -> str:
    """Route an article to tuning or validation by a salted id hash."""
    if validation_fraction <= 0.0:
        return TUNING
    if unit_interval(seed, "validation", article_id) < validation_fraction:
        return VALIDATION
    return TUNING


@dataclass
class GenerationStats:
    """Counters accumulated while generating; everything the stats file needs."""

    articles: Counter = field(default_factory=Counter)
    paragraphs_seen: int = 0
    filter_counts: Counter = field(default_factory=Counter)
    j_histogram: Counter = field(default_factory=Counter)
    hard_histogram: Counter = field(default_factory=Counter)
    label_histogram: Counter = field(default_factory=Counter)
    samples_by_split: Counter = field(default_factory=Counter)

    def observe_sample(self, sample: FspSample, split: str) -> None:
        self.j_histogram[sample.j_count] += 1
        self.hard_histogram[sum(sample.is_hard)] += 1
        self.label_histogram[sample.label] += 1
        self.samples_by_split[split] += 1


@dataclass
class _PoolRecord:
    article_id: str
    paragraph_index: int
    option: str
    text: str
    source: str | None
    category: str | None


def _collect(
    articles: Iterable[Article],
    cfg: SamplerConfig,
    stats: GenerationStats,
) -> tuple[OptionPool, list[_PoolRecord]]:
    """Pass 1: segment, filter, and pool every kept paragraph."""
    dedup = DedupIndex()
    pool = OptionPool()
    records: list[_PoolRecord] = []
    for article in articles:
        stats.articles[article.source] += 1
        for index, paragraph in enumerate(article.paragraphs):
            rec = ParagraphRecord(
                article_id=article.article_id,
                paragraph_index=index,
                sentences=split_sentences(paragraph),
                category=article.category,
            )
            verdict = filter_paragraph(rec, dedup)
            stats.paragraphs_seen += 1
            stats.filter_counts[verdict.reason] += 1
            if not verdict.kept:
                continue
            split_rng = random.Random(
                derive_seed(cfg.seed, article.article_id, index, "split")
            )
            option, text = designated_split(rec, cfg.objective, split_rng)
            pool.add(article.article_id, index, option)
            records.append(
                _PoolRecord(
                    article_id=article.article_id,
                    paragraph_index=index,
                    option=option,
                    text=text,
                    source=article.source,
                    category=article.category,
                )
            )
    pool.freeze()
    return pool, records


def _emit(record: _PoolRecord, pool: OptionPool, cfg: SamplerConfig) -> FspSample:
    rng = random.Random(
        derive_seed(cfg.seed, record.article_id, record.paragraph_index, "draw")
    )
    negatives = sample_negatives(
        pool,
        (record.article_id, record.paragraph_index),
        cfg,
        rng,
        positive_option=record.option,
    )
    return assemble(
        record.option,
        record.text,
        negatives,
        cfg,
        rng,
        (record.article_id, record.paragraph_index),
        source=record.source,
        category=record.category,
    )


# Worker-side state for the fork-based pool; set once per worker.
_WORKER: dict = {}


def _worker_init(pool: OptionPool, records: list[_PoolRecord], cfg: SamplerConfig):
    _WORKER["pool"] = pool
    _WORKER["records"] = records
    _WORKER["cfg"] = cfg


def _worker_emit(index: int) -> FspSample:
    return _emit(_WORKER["records"][index], _WORKER["pool"], _WORKER["cfg"])


def generate(
    articles: Iterable[Article],
    cfg: SamplerConfig,
    stats: GenerationStats | None = None,
    workers: int = 1,
) -> Iterator[FspSample]:
    """Two-pass pipeline: build the option pool, then emit one sample per paragraph.

    Output order and content are functions of (corpus, cfg) only; the worker
    count changes nothing because every sample carries its own derived RNG.
    """
    stats = stats if stats is not None else GenerationStats()
    pool, records = _collect(articles, cfg, stats)
    if workers <= 1:
        for record in records:
            sample = _emit(record, pool, cfg)
            stats.observe_sample(
                sample, assign_split(record.article_id, cfg.validation_fraction, cfg.seed)
            )
            yield sample
        return
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(
        processes=workers, initializer=_worker_init, initargs=(pool, records, cfg)
    ) as proc_pool:
        for record, sample in zip(
            records, proc_pool.imap(_worker_emit, range(len(records)), chunksize=256)
        ):
            stats.observe_sample(
                sample, assign_split(record.article_id, cfg.validation_fraction, cfg.seed)
            )
            yield sample


def sample_to_record(sample: FspSample) -> dict:
    """JSON-ready shard record for one sample."""
    return {
        "options": sample.options,
        "label": sample.label,
        "text": sample.text,
        "meta": {
            "positive": list(sample.positive_source),
            "negatives": [list(src) for src in sample.negative_sources],
            "is_hard": sample.is_hard,
            "source": sample.source,
            "category": sample.category,
        },
    }


def sample_from_record(record: dict) -> FspSample:
    """Inverse of sample_to_record."""
    meta = record.get("meta", {})
    positive = meta.get("positive", ["", -1])
    return FspSample(
        options=list(record["options"]),
        label=int(record["label"]),
        text=record["text"],
        positive_source=(positive[0], int(positive[1])),
        negative_sources=[(src[0], int(src[1])) for src in meta.get("negatives", [])],
        is_hard=[bool(x) for x in meta.get("is_hard", [])],
        source=meta.get("source"),
        category=meta.get("category"),
    )
