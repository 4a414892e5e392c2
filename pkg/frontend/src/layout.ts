// Layered top-down DAG layout. The alert graph is acyclic by construction,
// so longest-path layering by topological rank is well-defined; a barycenter
// sweep tidies the crossings enough for triage.

import type { GraphDoc } from "./types.js";

export interface PlacedNode {
    key: string;
    label: string;
    threat: number;
    rank: number;
    slot: number;
    x: number;
    y: number;
}

export interface Layout {
    nodes: Map<string, PlacedNode>;
    width: number;
    height: number;
}

export const X_SPACING = 170;
export const Y_SPACING = 110;

export function topologicalRanks(doc: GraphDoc): Map<string, number> {
    const indegree = new Map<string, number>();
    const out = new Map<string, string[]>();
    for (const node of doc.nodes) {
        indegree.set(node.key, 0);
        out.set(node.key, []);
    }
    for (const edge of doc.edges) {
        if (!indegree.has(edge.src) || !indegree.has(edge.dst)) {
            continue;
        }
        indegree.set(edge.dst, (indegree.get(edge.dst) ?? 0) + 1);
        out.get(edge.src)?.push(edge.dst);
    }
    const rank = new Map<string, number>();
    const ready = [...indegree.entries()].filter(([, d]) => d === 0).map(([k]) => k).sort();
    for (const key of ready) {
        rank.set(key, 0);
    }
    const queue = [...ready];
    while (queue.length > 0) {
        const key = queue.shift() as string;
        for (const next of out.get(key) ?? []) {
            const candidate = (rank.get(key) ?? 0) + 1;
            if (candidate > (rank.get(next) ?? 0)) {
                rank.set(next, candidate);
            }
            indegree.set(next, (indegree.get(next) ?? 1) - 1);
            if (indegree.get(next) === 0) {
                queue.push(next);
            }
        }
    }
    // disconnected leftovers (defensive): park them on rank 0
    for (const node of doc.nodes) {
        if (!rank.has(node.key)) {
            rank.set(node.key, 0);
        }
    }
    return rank;
}

export function layout(doc: GraphDoc): Layout {
    const ranks = topologicalRanks(doc);
    const layers = new Map<number, string[]>();
    for (const node of doc.nodes) {
        const r = ranks.get(node.key) ?? 0;
        if (!layers.has(r)) {
            layers.set(r, []);
        }
        layers.get(r)?.push(node.key);
    }
    for (const keys of layers.values()) {
        keys.sort();
    }
    // one barycenter pass: order each layer by mean predecessor slot
    const slot = new Map<string, number>();
    const preds = new Map<string, string[]>();
    for (const edge of doc.edges) {
        if (!preds.has(edge.dst)) {
            preds.set(edge.dst, []);
        }
        preds.get(edge.dst)?.push(edge.src);
    }
    const maxRank = Math.max(0, ...layers.keys());
    for (let r = 0; r <= maxRank; r += 1) {
        const keys = layers.get(r) ?? [];
        if (r > 0) {
            keys.sort((a, b) => barycenter(a) - barycenter(b) || a.localeCompare(b));
        }
        keys.forEach((key, i) => slot.set(key, i));
    }

    function barycenter(key: string): number {
        const sources = (preds.get(key) ?? []).filter((p) => slot.has(p));
        if (sources.length === 0) {
            return Number.MAX_SAFE_INTEGER;
        }
        return sources.reduce((acc, p) => acc + (slot.get(p) ?? 0), 0) / sources.length;
    }

    const nodes = new Map<string, PlacedNode>();
    let widest = 1;
    const byThreat = new Map(doc.nodes.map((n) => [n.key, n]));
    for (const [key, r] of ranks) {
        const s = slot.get(key) ?? 0;
        widest = Math.max(widest, s + 1);
        const source = byThreat.get(key);
        nodes.set(key, {
            key,
            label: source?.label ?? key,
            threat: source?.threat ?? 0,
            rank: r,
            slot: s,
            x: 40 + s * X_SPACING,
            y: 40 + r * Y_SPACING,
        });
    }
    return {
        nodes,
        width: 80 + widest * X_SPACING,
        height: 80 + (maxRank + 1) * Y_SPACING,
    };
}
