"""Temporal acyclic directed graph over entity instances.

Nodes are versioned entity instances; edges carry one event group each,
directed actor -> target. Acyclicity comes from provenance-style
versioning: when an entity receives after it has emitted, the edge lands on
a fresh version node, so information can only flow forward in time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .compress import EventGroup
from .entities import Entity


class GraphError(ValueError):
    pass


@dataclass
class Node:
    key: str
    entity: Entity
    version: int
    threat: float = 0.0

    @property
    def label(self) -> str:
        base = self.entity[1]
        return base if self.version == 1 else f"{base}:v{self.version}"


@dataclass
class Edge:
    src: str
    dst: str
    action: str
    ts: int
    group_index: int
    incongruity: float
    rarity: float = 0.0


@dataclass
class EventGraph:
    nodes: dict[str, Node] = field(default_factory=dict)
    edges: list[Edge] = field(default_factory=list)
    groups: list[EventGroup] = field(default_factory=list)

    def in_edges(self, key: str) -> list[Edge]:
        return [e for e in self.edges if e.dst == key]


def _node_key(entity: Entity, version: int) -> str:
    return f"{entity[0]}:{entity[1]}@v{version}"


def build_graph(groups: list[EventGroup]) -> EventGraph:
    """One edge per group, actor node to target node, versions bumped on
    receive-after-emit."""
    g = EventGraph(groups=list(groups))
    version: dict[Entity, int] = {}
    emitted: dict[Entity, bool] = {}
    last_ts = None

    def current(entity: Entity) -> Node:
        v = version.setdefault(entity, 1)
        key = _node_key(entity, v)
        node = g.nodes.get(key)
        if node is None:
            node = Node(key=key, entity=entity, version=v)
            g.nodes[key] = node
        return node

    for idx, group in enumerate(g.groups):
        if last_ts is not None and group.first_ts < last_ts:
            raise GraphError("groups must be time-ordered")
        last_ts = group.first_ts
        src_entity, dst_entity = group.src_entity, group.dst_entity
        src = current(src_entity)
        emitted[src_entity] = True
        if emitted.get(dst_entity):
            version[dst_entity] = version.get(dst_entity, 1) + 1
            emitted[dst_entity] = False
        dst = current(dst_entity)
        g.edges.append(
            Edge(
                src=src.key,
                dst=dst.key,
                action=group.action,
                ts=group.first_ts,
                group_index=idx,
                incongruity=group.max_aggregate,
            )
        )
    return g


def topological_order(g: EventGraph) -> list[str]:
    """Kahn's algorithm; raises GraphError on a cycle."""
    in_deg = {key: 0 for key in g.nodes}
    out: dict[str, list[str]] = {key: [] for key in g.nodes}
    for e in g.edges:
        in_deg[e.dst] += 1
        out[e.src].append(e.dst)
    ready = sorted(key for key, d in in_deg.items() if d == 0)
    order: list[str] = []
    while ready:
        key = ready.pop()
        order.append(key)
        for nxt in out[key]:
            in_deg[nxt] -= 1
            if in_deg[nxt] == 0:
                ready.append(nxt)
    if len(order) != len(g.nodes):
        raise GraphError("cycle detected")
    return order
