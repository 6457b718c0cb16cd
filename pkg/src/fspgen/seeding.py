"""Stable seed derivation so per-record randomness is independent of stream order."""

import hashlib

_SEP = b"\x1f"


def derive_seed(*parts) -> int:
    """Map heterogeneous parts (ints, strings) to a stable 64-bit integer."""
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(str(part).encode("utf-8"))
        h.update(_SEP)
    return int.from_bytes(h.digest(), "big")


def unit_interval(*parts) -> float:
    """Deterministic hash of the parts mapped into [0, 1)."""
    return derive_seed(*parts) / 2.0**64
