"""Toy masked-LM harness: tune on generated shards, score rendered tasks."""

from .data import OverlongOptionsError, collate, encode_rendered, encode_sample
from .infer import constrained_accuracy, infer, score_rendered
from .model import MaskedEncoder
from .tune import HarnessConfig, TuneResult, load_checkpoint, tune
from .vocab import Vocab, tokenize

__version__ = "0.1.0"

__all__ = [
    "HarnessConfig",
    "MaskedEncoder",
    "OverlongOptionsError",
    "TuneResult",
    "Vocab",
    "collate",
    "constrained_accuracy",
    "encode_rendered",
    "encode_sample",
    "infer",
    "load_checkpoint",
    "score_rendered",
    "tokenize",
    "tune",
]
