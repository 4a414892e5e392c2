"""Poisoning guard and continual-training batch assembly."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..detector.bank import ScoredEvent
from ..events import Event
from .memory import EpisodicMemory

logger = logging.getLogger(__name__)

DEFAULT_RATIOS = (0.4, 0.5, 0.1)  # memory / recent / reintroduced FPs


@dataclass(frozen=True)
class GuardResult:
    admitted: list[ScoredEvent]
    quarantined: list[ScoredEvent]


def poisoning_guard(candidates: list[ScoredEvent], ceiling: float,
                    approvals: frozenset = frozenset()) -> GuardResult:
    """Split a scored stream at the benign ceiling.

    Events at or above the ceiling are quarantined for low-priority review
    unless an analyst already approved them; everything else may train.
    """
    admitted, quarantined = [], []
    for s in candidates:
        if s.score.aggregate >= ceiling and s.event.id not in approvals:
            quarantined.append(s)
        else:
            admitted.append(s)
    return GuardResult(admitted=admitted, quarantined=quarantined)


def _draw_counts(size: int, ratios: tuple[float, float, float]) -> list[int]:
    raw = [size * r for r in ratios]
    counts = [int(np.floor(v)) for v in raw]
    remainders = sorted(range(3), key=lambda i: (raw[i] - counts[i], -i), reverse=True)
    for i in remainders[: size - sum(counts)]:
        counts[i] += 1
    return counts


def assemble_batch(
    mem: EpisodicMemory,
    recent: list[Event],
    reintroduced_fp: list[Event],
    size: int,
    ratios: tuple[float, float, float] = DEFAULT_RATIOS,
    seed: int = 0,
) -> list[Event]:
    """Mix memory, recent admitted traffic and reintroduced FPs at the given
    ratios (exact draw counts). An empty source renormalizes the others with
    a logged warning."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError("ratios must sum to 1")
    sources = [mem.snapshot(), list(recent), list(reintroduced_fp)]
    names = ("memory", "recent", "reintroduced_fp")
    active = list(ratios)
    for i, pool in enumerate(sources):
        if not pool and active[i] > 0:
            logger.warning("assemble_batch: source %r empty, renormalizing", names[i])
            active[i] = 0.0
    total = sum(active)
    if total == 0.0:
        raise ValueError("all batch sources are empty")
    active = tuple(r / total for r in active)
    counts = _draw_counts(size, active)
    rng = np.random.default_rng(seed)
    batch: list[Event] = []
    for pool, count in zip(sources, counts):
        if count == 0:
            continue
        idx = rng.integers(0, len(pool), size=count)
        batch.extend(pool[i] for i in idx)
    return batch
