"""Major-interest subgraph extraction, pruning and major-event timelines.

An alert forms around anchor nodes (threat >= tau) linked through edges that
are either rare transfers or carry anchor-level incongruity themselves. A
lone anomalous event is not an attack: components need ``min_anchors``
linked anchors before they surface (set it to 1 for the permissive
behaviour). The threshold tau defaults to a high percentile of benign node
threats, making it a direct false-alert-budget knob.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .compress import EventGroup
from .graph import Edge, EventGraph

DEFAULT_RHO = 0.8
DEFAULT_MIN_ANCHORS = 3
DEFAULT_TAU_PERCENTILE = 99.9


def threshold_from_benign(threats, percentile: float = DEFAULT_TAU_PERCENTILE) -> float:
    """Calibrate tau as a percentile of benign propagated node threats."""
    arr = np.asarray(list(threats), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("no benign threats to calibrate on")
    return float(np.percentile(arr, percentile))


@dataclass
class AlertGraph:
    alert_id: str
    tau: float
    node_threats: dict[str, float]
    node_labels: dict[str, str]
    edges: list[Edge]
    groups: list[EventGroup]  # aligned with edges via group_index
    created_ts: int
    pruned: bool = False

    @property
    def threat_score(self) -> float:
        return max(self.node_threats.values(), default=0.0)

    @property
    def member_event_ids(self) -> list[str]:
        out: list[str] = []
        for g in self.groups:
            out.extend(g.member_ids)
        return out

    def anchor_count(self) -> int:
        return sum(1 for t in self.node_threats.values() if t >= self.tau)


@dataclass(frozen=True)
class TimelineEntry:
    bucket_ts: int
    label: str
    host: str
    threat: float


@dataclass(frozen=True)
class Timeline:
    alert_id: str
    entries: tuple[TimelineEntry, ...]


def _components(nodes: set, edge_list: list[Edge]) -> list[set]:
    """Weakly connected components over structurally linked nodes.

    Beyond the explicit edges, an entity's version chain counts as linked
    (versions are created *and* linked), and a process is linked to the host
    it runs on, so correlation follows entities through time and through the
    machine boundary.
    """
    parent = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for e in edge_list:
        union(e.src, e.dst)
    by_entity: dict[str, str] = {}
    for n in nodes:
        entity = n.rsplit("@v", 1)[0]
        if entity in by_entity:
            union(by_entity[entity], n)
        else:
            by_entity[entity] = n
    for entity, rep in by_entity.items():
        if entity.startswith("process:") and "/" in entity:
            host_entity = "host:" + entity.split(":", 1)[1].split("/", 1)[0]
            if host_entity in by_entity:
                union(rep, by_entity[host_entity])
    comps: dict[str, set] = {}
    for n in nodes:
        comps.setdefault(find(n), set()).add(n)
    return list(comps.values())


def extract_alerts(
    g: EventGraph,
    tau: float,
    *,
    rho: float = DEFAULT_RHO,
    min_anchors: int = DEFAULT_MIN_ANCHORS,
    run_id: str = "run",
    edge_filter=None,
) -> list[AlertGraph]:
    """Connected high-threat subgraphs of a propagated graph.

    Rare transfers (rarity >= rho) form the correlation backbone; weakly
    connected backbone components survive when they link >= min_anchors
    anchor nodes (threat >= tau). Anchor-level incongruity edges adjacent to
    a surviving component attach to it as evidence, but cannot form or merge
    components on their own: a burst of unrelated score-ceiling events on a
    shared hub never becomes an alert. The alert's creation time is its
    first backbone transfer.
    """
    anchors = {key for key, node in g.nodes.items() if node.threat >= tau}
    if not anchors:
        return []
    backbone = [e for e in g.edges if e.rarity >= rho]
    if edge_filter is not None:
        # optional second filter, off by default: drop transfers that are
        # rare at system scale yet regular at human timescale
        backbone = [e for e in backbone if edge_filter(e, g.groups[e.group_index])]
    nodes = set(anchors)
    for e in backbone:
        nodes.add(e.src)
        nodes.add(e.dst)
    hot = [e for e in g.edges if e.incongruity >= tau and e.rarity < rho]
    alerts = []
    for comp in sorted(_components(nodes, backbone), key=lambda c: min(c)):
        comp_anchors = comp & anchors
        if len(comp_anchors) < min_anchors:
            continue
        comp_edges = [e for e in backbone if e.src in comp and e.dst in comp]
        if not comp_edges:
            continue
        created = min(e.ts for e in comp_edges)
        comp_nodes = set(comp)
        for e in hot:
            if e.src in comp_nodes or e.dst in comp_nodes:
                comp_edges.append(e)
        # attached edges may pull in one-hop endpoints
        member_nodes = set(comp)
        for e in comp_edges:
            member_nodes.add(e.src)
            member_nodes.add(e.dst)
        comp_edges.sort(key=lambda e: (e.ts, e.group_index))
        local_groups = []
        edges = []
        for e in comp_edges:
            edges.append(replace_group_index(e, len(local_groups)))
            local_groups.append(g.groups[e.group_index])
        alerts.append(
            AlertGraph(
                alert_id=f"{run_id}-a{len(alerts) + 1:03d}",
                tau=tau,
                node_threats={k: g.nodes[k].threat for k in sorted(member_nodes)},
                node_labels={k: g.nodes[k].label for k in sorted(member_nodes)},
                edges=edges,
                groups=local_groups,
                created_ts=created,
            )
        )
    return alerts


def replace_group_index(e: Edge, new_index: int) -> Edge:
    return Edge(src=e.src, dst=e.dst, action=e.action, ts=e.ts,
                group_index=new_index, incongruity=e.incongruity, rarity=e.rarity)


def prune(a: AlertGraph, floor: float) -> AlertGraph:
    """Iteratively strip leaf-ward suffixes of strictly decreasing threat
    ending below ``floor``; anchors (threat >= tau) are never removed."""
    keep = dict(a.node_threats)
    edges = list(a.edges)
    changed = True
    while changed:
        changed = False
        degree: dict[str, int] = {k: 0 for k in keep}
        neighbor: dict[str, str] = {}
        for e in edges:
            degree[e.src] += 1
            degree[e.dst] += 1
            neighbor[e.src] = e.dst
            neighbor[e.dst] = e.src
        for key in sorted(keep):
            if degree.get(key, 0) > 1:
                continue
            threat = keep[key]
            if threat >= a.tau or threat >= floor:
                continue
            other = neighbor.get(key)
            if other is None or keep[other] <= threat:
                continue
            del keep[key]
            edges = [e for e in edges if e.src != key and e.dst != key]
            changed = True
            break
    local_groups = []
    new_edges = []
    for e in edges:
        new_edges.append(replace_group_index(e, len(local_groups)))
        local_groups.append(a.groups[e.group_index])
    return AlertGraph(
        alert_id=a.alert_id,
        tau=a.tau,
        node_threats=keep,
        node_labels={k: a.node_labels[k] for k in keep},
        edges=new_edges,
        groups=local_groups,
        created_ts=a.created_ts,
        pruned=True,
    )


def timeline(a: AlertGraph, k: int, *, bucket_ms: int = 60_000) -> Timeline:
    """Chronological strip of the top-k most anomalous groups of an alert.

    Repeats of one behaviour (a scan's probes, block reads) collapse to one
    entry per (actor, action) pattern, so the strip reads as major steps:
    first contact, tool launch, scan, exfiltration, trace deletion.
    """
    on_backbone = [False] * len(a.groups)
    for e in a.edges:
        if e.rarity >= DEFAULT_RHO:
            on_backbone[e.group_index] = True
    order = sorted(
        range(len(a.groups)),
        key=lambda i: (-a.groups[i].max_aggregate, not on_backbone[i], a.groups[i].first_ts, i),
    )
    ranked: list[int] = []
    seen_patterns: set = set()
    for i in order:
        pattern = (a.groups[i].actor, a.groups[i].action)
        if pattern in seen_patterns:
            continue
        seen_patterns.add(pattern)
        ranked.append(i)
        if len(ranked) >= max(k, 0):
            break
    entries = []
    for i in sorted(ranked, key=lambda i: (a.groups[i].first_ts, i)):
        g = a.groups[i]
        entries.append(
            TimelineEntry(
                bucket_ts=(g.first_ts // bucket_ms) * bucket_ms,
                label=g.label,
                host=g.location,
                threat=g.max_aggregate,
            )
        )
    return Timeline(alert_id=a.alert_id, entries=tuple(entries))
