"""Sentence segmentation, paragraph filtering, and exact-duplicate tracking.

The segmenter is rule-based and dependency-free: sentences end at ``.``, ``!``
or ``?`` (runs allowed), optionally followed by closing quotes/brackets, when
whitespace follows. A fixed abbreviation list suppresses false splits; any
trailing un-terminated text becomes the final sentence. Splitting never drops
characters, so joining the output with single spaces reproduces the
whitespace-collapsed input.
"""

from __future__ import annotations

import hashlib
import threading
import unicodedata
from dataclasses import dataclass

TERMINATORS = ".!?"
CLOSERS = "\"')]}»”’"  # " ' ) ] } » ” ’
OPENERS = "\"'([{«“‘"  # " ' ( [ { « “ ‘

ABBREVIATIONS = frozenset(
    {
        "Mr.", "Mrs.", "Dr.", "Prof.", "St.", "vs.", "etc.", "e.g.", "i.e.",
        "U.S.", "Jr.", "Sr.", "No.", "Fig.", "al.",
    }
)

# Filter reasons, checked in this order.
KEPT = "kept"
SINGLE_SENTENCE = "single_sentence"
SHORT_FIRST = "short_first"
NON_ALPHABETIC_FIRST = "non_alphabetic_first"
DUPLICATE = "duplicate"
REJECT_REASONS = (SINGLE_SENTENCE, SHORT_FIRST, NON_ALPHABETIC_FIRST, DUPLICATE)
ALL_REASONS = (KEPT,) + REJECT_REASONS


@dataclass
class ParagraphRecord:
    article_id: str
    paragraph_index: int
    sentences: list[str]
    category: str | None = None


@dataclass
class FilterVerdict:
    kept: bool
    reason: str


def split_sentences(text: str) -> list[str]:
    """Split whitespace-normalized text into sentences."""
    sentences: list[str] = []
    n = len(text)
    start = 0
    i = 0
    while i < n:
        if text[i] not in TERMINATORS:
            i += 1
            continue
        first_term = i
        j = i
        while j + 1 < n and text[j + 1] in TERMINATORS:
            j += 1
        while j + 1 < n and text[j + 1] in CLOSERS:
            j += 1
        if j + 1 >= n:
            break  # end of text; the tail flush below picks it up
        if not text[j + 1].isspace():
            i = j + 1
            continue
        if _ends_abbreviation(text, start, first_term):
            i = j + 1
            continue
        piece = text[start : j + 1].strip()
        if piece:
            sentences.append(piece)
        start = j + 2
        i = start
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _ends_abbreviation(text: str, start: int, period: int) -> bool:
    """True when the word ending at ``period`` is a known abbreviation."""
    k = period
    while k > start and not text[k - 1].isspace():
        k -= 1
    word = text[k : period + 1].lstrip(OPENERS)
    return word in ABBREVIATIONS


def dedup_key(text: str) -> int:
    """Stable 64-bit key of the text after NFC, lowercasing, and space collapse."""
    normalized = " ".join(unicodedata.normalize("NFC", text).lower().split())
    digest = hashlib.blake2b(normalized.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


class DedupIndex:
    """Set of paragraph keys with thread-safe insert-if-absent."""

    def __init__(self):
        self._keys: set[int] = set()
        self._lock = threading.Lock()

    def add(self, key: int) -> bool:
        """Insert the key; return True if it was new."""
        with self._lock:
            if key in self._keys:
                return False
            self._keys.add(key)
            return True

    def __contains__(self, key: int) -> bool:
        return key in self._keys

    def __len__(self) -> int:
        return len(self._keys)


def filter_paragraph(rec: ParagraphRecord, dedup: DedupIndex) -> FilterVerdict:
    """Apply the rejection rules in fixed order; register kept paragraphs."""
    if len(rec.sentences) < 2:
        return FilterVerdict(kept=False, reason=SINGLE_SENTENCE)
    first = rec.sentences[0].strip()
    if len(first) <= 3:
        return FilterVerdict(kept=False, reason=SHORT_FIRST)
    if not any(ch.isalpha() for ch in first):
        return FilterVerdict(kept=False, reason=NON_ALPHABETIC_FIRST)
    if not dedup.add(dedup_key(" ".join(rec.sentences))):
        return FilterVerdict(kept=False, reason=DUPLICATE)
    return FilterVerdict(kept=True, reason=KEPT)
