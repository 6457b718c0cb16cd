"""Word-level tokenizer and vocabulary for the toy masked LM.

Marker strings ([CLS], [SEP], [PAD], [MASK]) and index indicators ((A), (B),
...) are atomic tokens mapped straight to their ids, which is how the stored
markers get "replaced by the tokenizer's native specials" at encode time.
Digit runs split into single digits so ledger-style numbers cannot bloat the
vocabulary.
"""

from __future__ import annotations

import json
import re
import string
from collections import Counter
from pathlib import Path

PAD, UNK, CLS, SEP, MASK = "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"
SPECIALS = [PAD, UNK, CLS, SEP, MASK]
PAD_ID, UNK_ID, CLS_ID, SEP_ID, MASK_ID = range(5)

_TOKEN_RE = re.compile(
    r"\[CLS\]|\[SEP\]|\[PAD\]|\[MASK\]|\[UNK\]"
    r"|\([A-Z]\)"
    r"|[A-Za-z_]+(?:'[A-Za-z]+)?"
    r"|[0-9]"
    r"|[^\sA-Za-z0-9_]"
)

_KEEP_CASE = re.compile(r"\[\w+\]|\([A-Z]\)")


def tokenize(text: str) -> list[str]:
    tokens = []
    for match in _TOKEN_RE.finditer(text):
        token = match.group(0)
        tokens.append(token if _KEEP_CASE.fullmatch(token) else token.lower())
    return tokens


def indicator_token(slot: int) -> str:
    return f"({string.ascii_uppercase[slot]})"


class Vocab:
    def __init__(self, tokens: list[str]):
        self.itos = list(tokens)
        self.stoi = {t: i for i, t in enumerate(self.itos)}
        if self.itos[:5] != SPECIALS:
            raise ValueError("vocabulary must start with the special tokens")

    def __len__(self) -> int:
        return len(self.itos)

    def id(self, token: str) -> int:
        return self.stoi.get(token, UNK_ID)

    def encode(self, tokens: list[str]) -> list[int]:
        return [self.stoi.get(t, UNK_ID) for t in tokens]

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.itos, ensure_ascii=False) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "Vocab":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    @classmethod
    def build(
        cls,
        token_streams,
        n_model: int = 20,
        min_freq: int = 1,
        max_size: int = 20_000,
    ) -> "Vocab":
        counts = Counter()
        for tokens in token_streams:
            counts.update(tokens)
        indicators = [indicator_token(i) for i in range(n_model)]
        words = [
            t
            for t, c in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
            if c >= min_freq and t not in SPECIALS and t not in indicators
        ]
        capacity = max_size - len(SPECIALS) - len(indicators)
        return cls(SPECIALS + indicators + words[:capacity])
