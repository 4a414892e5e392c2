"""Frequent-structure compression: scored events -> lossless event groups.

Single pass, bounded state. Three merge paths, in precedence order:
rule-based cascades (consequents fold into their antecedent's group),
repeated-similar runs (same template, bottleneck-embedding distance below
epsilon, contiguous within the window), singletons otherwise. Grouping state
is kept per actor instance, so interleaved streams from different machines
cannot break each other's runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..detector.bank import ScoredEvent
from .entities import Entity, Template, view
from .rules import RuleSet

DEFAULT_WINDOW_MS = 2_000.0
DEFAULT_EPS = 0.5


@dataclass
class EventGroup:
    gid: int
    label: str
    kind: str  # concomitant | repeated-similar | singleton
    template: Template
    actor: str
    action: str
    resource: str | None
    location: str
    src_entity: Entity
    dst_entity: Entity
    first_ts: int
    last_ts: int
    member_ids: list[str] = field(default_factory=list)
    max_aggregate: float = 0.0
    per_field_max: dict[str, float] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.member_ids)

    @property
    def type_triple(self) -> tuple[str, str, str]:
        return (self.src_entity[0], self.action, self.dst_entity[0])

    @property
    def attributed_field(self) -> str | None:
        if not self.per_field_max:
            return None
        return max(self.per_field_max, key=lambda k: (self.per_field_max[k], k))


def _rules_csr(rules: RuleSet, intern: dict[Template, int]):
    for r in rules.rules:
        for tpl in (r.antecedent, r.consequent):
            if tpl not in intern:
                intern[tpl] = len(intern)
    n = len(intern)
    rows: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for r in rules.rules:
        rows[intern[r.consequent]].append((intern[r.antecedent], r.dt_ms))
    indptr = np.zeros(n + 1, dtype=np.int64)
    ants: list[int] = []
    dts: list[float] = []
    for i, row in enumerate(rows):
        row.sort()
        for ant, dt in row:
            ants.append(ant)
            dts.append(dt)
        indptr[i + 1] = len(ants)
    return indptr, np.array(ants, dtype=np.int64), np.array(dts, dtype=np.float64)


def compress(
    stream,
    rules: RuleSet,
    eps: float = DEFAULT_EPS,
    *,
    embeddings: np.ndarray | None = None,
    window_ms: float = DEFAULT_WINDOW_MS,
    resolver: dict[str, str] | None = None,
    chunk_size: int = 65_536,
    grouper_cls=None,
) -> list[EventGroup]:
    """Compress a time-ordered stream of ScoredEvents into groups.

    ``embeddings`` (row per event, stream order) come from the detector's
    bottleneck; without them, same-template events within the window merge
    unconditionally. The partition is lossless: every event lands in exactly
    one group. Raises on out-of-order input.
    """
    grouper_factory = grouper_cls if grouper_cls is not None else kernels.Grouper
    intern: dict[Template, int] = {}
    indptr, ants, dts = _rules_csr(rules, intern)
    groupers: dict[str, object] = {}
    local_to_global: dict[str, list[int]] = {}
    groups: list[EventGroup] = []
    view_cache: dict[tuple, tuple] = {}

    last_ts = None
    stream_index = 0
    chunk_events: list[ScoredEvent] = []
    chunk_offset = 0

    def flush(events: list[ScoredEvent], offset: int) -> None:
        n = len(events)
        if n == 0:
            return
        tids = np.empty(n, dtype=np.int64)
        times = np.empty(n, dtype=np.float64)
        by_actor: dict[str, list[int]] = {}
        infos = []
        for i, s in enumerate(events):
            e = s.event
            key = (e.actor, e.action, e.resource, e.location)
            cached = view_cache.get(key)
            if cached is None:
                v = view(e, resolver)
                tid = intern.setdefault(v.template, len(intern))
                cached = (tid, v)
                view_cache[key] = cached
            tids[i] = cached[0]
            times[i] = e.ts
            infos.append(cached[1])
            by_actor.setdefault(e.actor, []).append(i)
        for actor, idxs in by_actor.items():
            grouper = groupers.get(actor)
            if grouper is None:
                grouper = grouper_factory(indptr, ants, dts, window_ms, eps)
                groupers[actor] = grouper
                local_to_global[actor] = []
            ia = np.array(idxs, dtype=np.int64)
            sub_emb = None
            if embeddings is not None:
                sub_emb = np.ascontiguousarray(embeddings[ia + offset])
            local, codes = grouper.process(tids[ia], times[ia], sub_emb)
            g2g = local_to_global[actor]
            for pos, local_gid, code in zip(idxs, local, codes):
                lg = int(local_gid)
                if lg == len(g2g):
                    s = events[pos]
                    e = s.event
                    v = infos[pos]
                    g2g.append(len(groups))
                    groups.append(
                        EventGroup(
                            gid=len(groups),
                            label=f"{e.actor} {e.action} {e.resource or e.location}",
                            kind="singleton",
                            template=v.template,
                            actor=e.actor,
                            action=e.action,
                            resource=e.resource,
                            location=e.location,
                            src_entity=v.src,
                            dst_entity=v.dst,
                            first_ts=e.ts,
                            last_ts=e.ts,
                        )
                    )
                group = groups[g2g[lg]]
                s = events[pos]
                e = s.event
                group.member_ids.append(e.id)
                group.last_ts = max(group.last_ts, e.ts)
                if s.score.aggregate > group.max_aggregate:
                    group.max_aggregate = s.score.aggregate
                pf = group.per_field_max
                for name, value in s.score.per_field.items():
                    if value > pf.get(name, -1.0):
                        pf[name] = value
                if group.kind == "singleton" and code == kernels.JOIN_SIMILAR:
                    group.kind = "repeated-similar"
                elif group.kind == "singleton" and code == kernels.JOIN_RULE:
                    group.kind = "concomitant"

    for s in stream:
        ts = s.event.ts
        if last_ts is not None and ts < last_ts:
            raise ValueError(f"stream not time-ordered at event {s.event.id}")
        last_ts = ts
        chunk_events.append(s)
        stream_index += 1
        if len(chunk_events) >= chunk_size:
            flush(chunk_events, chunk_offset)
            chunk_offset = stream_index
            chunk_events = []
    flush(chunk_events, chunk_offset)
    groups.sort(key=lambda g: (g.first_ts, g.gid))
    for i, g in enumerate(groups):
        g.gid = i
    return groups


def ungroup(groups: list[EventGroup]) -> list[str]:
    """Multiset of member event ids (losslessness inverse of compress)."""
    out: list[str] = []
    for g in groups:
        out.extend(g.member_ids)
    return out
