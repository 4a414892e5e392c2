"""Exact pairwise association-rule mining over event templates.

A rule (antecedent template -> consequent template, max gap dt) captures
concomitant cascades such as an application start invariably followed by its
library loads. Mining is exact (no sampling) and scoped to a single actor
instance, matching the compression semantics.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from ..events import Event
from .entities import Template, view


@dataclass(frozen=True)
class Rule:
    antecedent: Template
    consequent: Template
    dt_ms: float
    support: int
    confidence: float

    def __post_init__(self):
        if not 0.0 < self.confidence <= 1.0:
            raise ValueError("confidence must lie in (0, 1]")


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...]
    min_support: int
    min_confidence: float

    def by_consequent(self) -> dict[Template, list[Rule]]:
        out: dict[Template, list[Rule]] = {}
        for r in self.rules:
            out.setdefault(r.consequent, []).append(r)
        return out

    @classmethod
    def empty(cls) -> "RuleSet":
        return cls(rules=(), min_support=1, min_confidence=1.0)


def mine_rules(
    corpus: list[Event],
    min_support: int,
    min_confidence: float,
    dt_ms: float,
    *,
    resolver: dict[str, str] | None = None,
) -> RuleSet:
    """All pairwise template rules meeting the thresholds.

    support(a -> b) counts antecedent occurrences followed by >= 1 event of
    template b from the same actor within dt; confidence divides by the
    antecedent count. Rules with a == b are left to repeated-similar merging.
    """
    if not corpus:
        raise ValueError("empty corpus")
    items = []
    last_ts = None
    for e in corpus:
        if last_ts is not None and e.ts < last_ts:
            raise ValueError("corpus must be time-ordered")
        last_ts = e.ts
        items.append((e.ts, e.actor, view(e, resolver).template))
    antecedent_counts: Counter = Counter(t for _, _, t in items)
    pair_support: Counter = Counter()
    n = len(items)
    for i in range(n):
        ts_i, actor_i, tpl_i = items[i]
        seen: set[Template] = set()
        j = i + 1
        while j < n and items[j][0] - ts_i <= dt_ms:
            if items[j][1] == actor_i:
                tpl_j = items[j][2]
                if tpl_j != tpl_i and tpl_j not in seen:
                    seen.add(tpl_j)
                    pair_support[(tpl_i, tpl_j)] += 1
            j += 1
    rules = []
    for (a, b), support in sorted(pair_support.items()):
        if support < min_support:
            continue
        confidence = support / antecedent_counts[a]
        if confidence < min_confidence:
            continue
        rules.append(Rule(antecedent=a, consequent=b, dt_ms=dt_ms, support=support, confidence=confidence))
    return RuleSet(rules=tuple(rules), min_support=min_support, min_confidence=min_confidence)
