"""Deterministic 60/20/20 train/validation/test stream split."""

from __future__ import annotations

import hashlib

BANDS = (("train", 0.60), ("validation", 0.80), ("test", 1.0))


def split_tag(event_id: str, seed: int) -> str:
    """Map an event id to its split band, purely from (id, seed).

    Uses the first 8 bytes of sha256 so the assignment is stable across
    processes and platforms.
    """
    digest = hashlib.sha256(f"{seed}:{event_id}".encode()).digest()
    u = int.from_bytes(digest[:8], "big") / 2**64
    for tag, upper in BANDS:
        if u < upper:
            return tag
    return "test"
