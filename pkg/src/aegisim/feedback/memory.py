"""Episodic memory: a bounded uniform sample of past benign events.

Algorithm-R reservoir sampling over the stream of low-incongruity events.
The incongruity ceiling at the gate is the memory's poisoning defense:
high-scoring events never enter, however slowly an attacker escalates.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..events import Event


@dataclass
class EpisodicMemory:
    capacity: int
    seed: int = 0
    events: list[Event] = field(default_factory=list)
    admitted: int = 0
    rejected: int = 0
    _rng: random.Random = field(default_factory=random.Random, repr=False)

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("capacity must be positive")
        self._rng = random.Random(self.seed)

    def insert(self, e: Event, aggregate: float, ceiling: float) -> bool:
        """Admit one event unless its score breaches the benign ceiling.

        Returns True when the event was admitted to the stream (it may or
        may not be retained, per reservoir sampling).
        """
        if aggregate >= ceiling:
            self.rejected += 1
            return False
        self.admitted += 1
        if len(self.events) < self.capacity:
            self.events.append(e)
        else:
            j = self._rng.randrange(self.admitted)
            if j < self.capacity:
                self.events[j] = e
        return True

    def snapshot(self) -> list[Event]:
        return list(self.events)


def reservoir_insert(mem: EpisodicMemory, e: Event, aggregate: float, ceiling: float) -> EpisodicMemory:
    mem.insert(e, aggregate, ceiling)
    return mem
