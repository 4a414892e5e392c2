"""Synthetic scored streams with known compression optimum.

Builds traffic dominated by the two frequent structures the compressor
targets: concomitant cascades (an exec followed by its library loads, rule
pre-mined) and block-repeated reads. The construction spaces structures so
no cross-structure merge is possible, which makes the optimal group count
exact and checkable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..detector import IncongruityScore
from ..detector.bank import ScoredEvent
from ..events import Event
from .entities import Template
from .rules import Rule, RuleSet

CASCADE_LEN = 20  # 1 exec + 19 library reads
RUN_LEN = 20
SINGLETON_SHARE = 0.05
N_ACTORS = 100
N_APPS = 50


@dataclass(frozen=True)
class SynthStream:
    events: list[ScoredEvent]
    embeddings: np.ndarray
    rules: RuleSet
    optimal_groups: int


def _score() -> IncongruityScore:
    return IncongruityScore(aggregate=0.31, per_field={})


def cascade_stream(n_events: int, seed: int = 0) -> SynthStream:
    """~47.5% cascade events, ~47.5% block reads, 5% singletons."""
    rng = np.random.default_rng(seed)
    actors = [f"PC{i:03d}/worker" for i in range(N_ACTORS)]
    rules = []
    for k in range(N_APPS):
        ant: Template = (f"process:worker", "exec", f"file:/usr/bin/app{k}")
        con: Template = (f"process:worker", "read", f"file:/usr/lib/app{k}.so")
        rules.append(Rule(antecedent=ant, consequent=con, dt_ms=2_000.0, support=100, confidence=1.0))
    ruleset = RuleSet(rules=tuple(rules), min_support=1, min_confidence=0.5)

    score = _score()
    shared_metrics: dict = {}
    events: list[ScoredEvent] = []
    emb_rows: list[int] = []  # index of the burst, re-used as embedding id
    optimal = 0
    ts = 0
    burst_id = 0
    i = 0
    actor_idx = 0
    app_cycle = np.zeros(N_ACTORS, dtype=np.int64)
    while i < n_events:
        actor = actors[actor_idx]
        actor_idx = (actor_idx + 1) % N_ACTORS
        u = rng.random()
        left = n_events - i
        if u < SINGLETON_SHARE or left < CASCADE_LEN:
            count = 1
            events.append(ScoredEvent(Event(
                id=f"sy-{i:08d}", ts=ts, actor=actor, action=f"one{i % 997}",
                location="PC", resource="/var/misc", source="os", metrics=shared_metrics,
            ), score))
            emb_rows.append(burst_id)
            ts += 1
            i += 1
        elif u < 0.5 + SINGLETON_SHARE / 2:
            app = int(app_cycle[actor_idx])
            app_cycle[actor_idx] = (app + 1) % N_APPS
            events.append(ScoredEvent(Event(
                id=f"sy-{i:08d}", ts=ts, actor=actor, action="exec",
                location="PC", resource=f"/usr/bin/app{app}", source="os", metrics=shared_metrics,
            ), score))
            emb_rows.append(burst_id)
            ts += 1
            for j in range(CASCADE_LEN - 1):
                events.append(ScoredEvent(Event(
                    id=f"sy-{i + 1 + j:08d}", ts=ts, actor=actor, action="read",
                    location="PC", resource=f"/usr/lib/app{app}.so", source="os",
                    metrics=shared_metrics,
                ), score))
                emb_rows.append(burst_id)
                ts += 1
            count = CASCADE_LEN
            i += CASCADE_LEN
        else:
            path = f"/data/blob{burst_id}"
            for j in range(RUN_LEN):
                events.append(ScoredEvent(Event(
                    id=f"sy-{i + j:08d}", ts=ts, actor=actor, action="read",
                    location="PC", resource=path, source="os", metrics=shared_metrics,
                ), score))
                emb_rows.append(burst_id)
                ts += 1
            count = RUN_LEN
            i += RUN_LEN
        optimal += 1
        burst_id += 1
    # one distinct embedding per burst: in-burst distance 0, cross-burst large
    emb = np.zeros((len(events), 4))
    rows = np.asarray(emb_rows, dtype=np.float64)
    emb[:, 0] = rows * 10.0
    emb[:, 1] = (rows % 7) * 3.0
    return SynthStream(events=events, embeddings=emb, rules=ruleset, optimal_groups=optimal)
