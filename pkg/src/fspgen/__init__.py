"""Self-supervised multiple-choice dataset construction and zero-shot prediction."""

from .format import IndicatorScheme, MarkerSet, TaskSpec, render_inference, render_tuning, verbalize
from .ingest import Article, IngestConfig, interleave, read_article_corpus, read_flat_corpus
from .predict import EvalReport, LogitsRecord, constrained_predict, evaluate
from .sampler import (
    FspSample,
    OptionPool,
    SamplerConfig,
    assemble,
    designated_split,
    generate,
    sample_negatives,
)
from .segment import FilterVerdict, ParagraphRecord, dedup_key, filter_paragraph, split_sentences

__version__ = "0.1.0"

__all__ = [
    "Article",
    "EvalReport",
    "FilterVerdict",
    "FspSample",
    "IndicatorScheme",
    "IngestConfig",
    "LogitsRecord",
    "MarkerSet",
    "OptionPool",
    "ParagraphRecord",
    "SamplerConfig",
    "TaskSpec",
    "assemble",
    "constrained_predict",
    "dedup_key",
    "designated_split",
    "evaluate",
    "filter_paragraph",
    "generate",
    "interleave",
    "read_article_corpus",
    "read_flat_corpus",
    "render_inference",
    "render_tuning",
    "sample_negatives",
    "split_sentences",
    "verbalize",
]
