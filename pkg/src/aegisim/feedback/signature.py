"""Alert signatures and their similarity, used to recognize known alerts.

A signature is label-independent: the multiset of typed edge transfers, the
set of anomaly-attributed fields, and a coarse node-count bucket. Weighted
Jaccard similarity (0.7 transfers, 0.3 fields) keeps the comparison
deterministic and explainable.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from ..correlator import AlertGraph

TRIPLE_WEIGHT = 0.7
FIELD_WEIGHT = 0.3


@dataclass(frozen=True)
class GraphSignature:
    triples: tuple[tuple[tuple[str, str, str], int], ...]  # sorted multiset
    fields: frozenset
    node_bucket: int

    def triple_counter(self) -> Counter:
        return Counter(dict(self.triples))


def signature(a: AlertGraph) -> GraphSignature:
    counts: Counter = Counter()
    fields: set[str] = set()
    for g in a.groups:
        counts[g.type_triple] += 1
        attributed = g.attributed_field
        if attributed is not None:
            fields.add(attributed)
    n = len(a.node_threats)
    bucket = 1
    while bucket * 2 <= n:
        bucket *= 2
    return GraphSignature(
        triples=tuple(sorted(counts.items())),
        fields=frozenset(fields),
        node_bucket=bucket,
    )


def _multiset_jaccard(x: Counter, y: Counter) -> float:
    if not x and not y:
        return 1.0
    inter = sum((x & y).values())
    union = sum((x | y).values())
    return inter / union if union else 1.0


def _set_jaccard(x: frozenset, y: frozenset) -> float:
    if not x and not y:
        return 1.0
    union = x | y
    return len(x & y) / len(union) if union else 1.0


def similarity(x: GraphSignature, y: GraphSignature) -> float:
    """Weighted Jaccard in [0,1]; symmetric; similarity(x, x) == 1."""
    return TRIPLE_WEIGHT * _multiset_jaccard(x.triple_counter(), y.triple_counter()) + \
        FIELD_WEIGHT * _set_jaccard(x.fields, y.fields)
