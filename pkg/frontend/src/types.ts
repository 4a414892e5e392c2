// API payload shapes (mirrors the service's JSON exactly; the console never
// computes scores client-side).

export interface AlertSummary {
    alert_id: string;
    run_id: string;
    state: string;
    verdict: string | null;
    threat_score: number;
    created_ts: number;
    nodes: number;
}

export interface GraphNode {
    key: string;
    label: string;
    threat: number;
}

export interface GraphEdge {
    src: string;
    dst: string;
    action: string;
    ts: number;
    incongruity: number;
    rarity: number;
    group: {
        label: string;
        kind: string;
        count: number;
        attributed?: string | null;
        member_ids: string[];
    };
}

export interface GraphDoc {
    alert_id: string;
    tau: number;
    threat_score: number;
    created_ts: number;
    pruned: boolean;
    nodes: GraphNode[];
    edges: GraphEdge[];
}

export interface TimelineEntry {
    bucket_ts: number;
    label: string;
    host: string;
    threat: number;
}

export interface TimelineDoc {
    alert_id: string;
    entries: TimelineEntry[];
}

export interface AlertDetail {
    alert_id: string;
    run_id: string;
    state: string;
    verdict: string | null;
    graph: GraphDoc;
    timeline: TimelineDoc;
    score: number;
}

export interface Metrics {
    events_per_s: number | null;
    alerts_pending: number;
    fp_count: number;
    soc_count: number;
    agent_eval_score: number | null;
    model_version: number;
}

export type Verdict = "true_positive" | "false_positive" | "authorized_anomaly";
