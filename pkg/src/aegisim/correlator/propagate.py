"""Anomaly propagation over the temporal DAG.

Processing nodes in topological order:

    threat(n) = max( max incongruity over in-edges,
                     max over in-edges of threat(src) * lambda * rarity(edge) )

Rare transfers carry threat forward; frequent ones damp it. Nodes without
in-edges stay at threat 0 (they only ever emitted).
"""

from __future__ import annotations

from .graph import EventGraph, topological_order
from .rarity import RarityModel


def propagate(g: EventGraph, rarity: RarityModel, lam: float) -> EventGraph:
    """Annotate nodes with threat levels and edges with their rarity."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("decay must lie in [0, 1]")
    incoming: dict[str, list] = {key: [] for key in g.nodes}
    for e in g.edges:
        e.rarity = rarity.rarity(g.groups[e.group_index].type_triple)
        incoming[e.dst].append(e)
    for key in topological_order(g):
        threat = 0.0
        for e in incoming[key]:
            threat = max(threat, e.incongruity, g.nodes[e.src].threat * lam * e.rarity)
        g.nodes[key].threat = threat
    return g
