"""Rarity of (source type, action, target type) transfers on benign data.

rarity(t) = -log((count(t)+1) / (N+T)) scaled to [0,1] by log(N+T), where N
is the total edge count and T the number of distinct triples; an unseen
triple sits exactly at the maximum 1.0.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .graph import EventGraph, GraphError


@dataclass(frozen=True)
class RarityModel:
    counts: dict[tuple[str, str, str], int]
    n_total: int
    n_distinct: int

    def rarity(self, triple: tuple[str, str, str]) -> float:
        denom = math.log(self.n_total + self.n_distinct)
        c = self.counts.get(triple, 0)
        value = -math.log((c + 1) / (self.n_total + self.n_distinct)) / denom
        return min(1.0, max(0.0, value))


def fit_rarity(benign: EventGraph) -> RarityModel:
    """Exact frequency table over the benign graph's edge triples."""
    if not benign.edges:
        raise GraphError("cannot fit rarity on an empty graph")
    counts: Counter = Counter()
    for e in benign.edges:
        counts[benign.groups[e.group_index].type_triple] += 1
    return RarityModel(counts=dict(counts), n_total=len(benign.edges), n_distinct=len(counts))
