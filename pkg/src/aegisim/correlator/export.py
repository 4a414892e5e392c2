"""Alert and timeline exports: structured documents plus DOT text."""

from __future__ import annotations

from .alerts import AlertGraph, Timeline, TimelineEntry


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def alert_to_dot(a: AlertGraph) -> str:
    """GraphViz rendering: node shade tracks threat, edge labels the action."""
    lines = [f"digraph {_quote(a.alert_id)} {{", "  rankdir=TB;"]
    for key in sorted(a.node_threats):
        threat = a.node_threats[key]
        shade = int(round(threat * 9))
        lines.append(
            f"  {_quote(key)} [label={_quote(a.node_labels[key])} "
            f"threat={threat:.4f} fillcolor={_quote(f'/reds9/{max(shade, 1)}')} style=filled];"
        )
    for e in a.edges:
        lines.append(
            f"  {_quote(e.src)} -> {_quote(e.dst)} "
            f"[label={_quote(e.action)} incongruity={e.incongruity:.4f} rarity={e.rarity:.4f}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def alert_to_doc(a: AlertGraph) -> dict:
    return {
        "alert_id": a.alert_id,
        "tau": a.tau,
        "threat_score": a.threat_score,
        "created_ts": a.created_ts,
        "pruned": a.pruned,
        "nodes": [
            {"key": k, "label": a.node_labels[k], "threat": a.node_threats[k]}
            for k in sorted(a.node_threats)
        ],
        "edges": [
            {
                "src": e.src,
                "dst": e.dst,
                "action": e.action,
                "ts": e.ts,
                "incongruity": e.incongruity,
                "rarity": e.rarity,
                "group": {
                    "label": a.groups[e.group_index].label,
                    "kind": a.groups[e.group_index].kind,
                    "count": a.groups[e.group_index].count,
                    "attributed": a.groups[e.group_index].attributed_field,
                    "member_ids": list(a.groups[e.group_index].member_ids),
                },
            }
            for e in a.edges
        ],
    }


def timeline_to_doc(t: Timeline) -> dict:
    return {
        "alert_id": t.alert_id,
        "entries": [
            {"bucket_ts": e.bucket_ts, "label": e.label, "host": e.host, "threat": e.threat}
            for e in t.entries
        ],
    }


def timeline_from_doc(doc: dict) -> Timeline:
    return Timeline(
        alert_id=doc["alert_id"],
        entries=tuple(
            TimelineEntry(bucket_ts=e["bucket_ts"], label=e["label"], host=e["host"], threat=e["threat"])
            for e in doc["entries"]
        ),
    )
