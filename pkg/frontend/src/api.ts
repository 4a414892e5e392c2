// Thin client over the service's HTTP/JSON API. The console is a pure API
// client: everything it shows comes from these calls.

import type { AlertDetail, AlertSummary, Metrics, Verdict } from "./types.js";

export class ConflictError extends Error {
    constructor(message: string) {
        super(message);
        this.name = "ConflictError";
    }
}

export class ServiceUnreachable extends Error {
    constructor(message: string) {
        super(message);
        this.name = "ServiceUnreachable";
    }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
    constructor(
        private readonly baseUrl: string,
        private readonly fetchImpl: FetchLike = fetch,
    ) {}

    private async request(path: string, init?: RequestInit): Promise<Response> {
        let response: Response;
        try {
            response = await this.fetchImpl(this.baseUrl + path, init);
        } catch (err) {
            throw new ServiceUnreachable(`service unreachable: ${String(err)}`);
        }
        return response;
    }

    async listAlerts(state = "pending"): Promise<AlertSummary[]> {
        const response = await this.request(`/alerts?state=${encodeURIComponent(state)}`);
        if (!response.ok) {
            throw new Error(`listAlerts failed: ${response.status}`);
        }
        const alerts = (await response.json()) as AlertSummary[];
        // server orders by score desc already; keep the contract locally too
        return alerts
            .slice()
            .sort((a, b) => b.threat_score - a.threat_score || a.alert_id.localeCompare(b.alert_id));
    }

    async getAlert(alertId: string): Promise<AlertDetail> {
        const response = await this.request(`/alerts/${encodeURIComponent(alertId)}`);
        if (response.status === 404) {
            throw new Error(`unknown alert ${alertId}`);
        }
        if (!response.ok) {
            throw new Error(`getAlert failed: ${response.status}`);
        }
        return (await response.json()) as AlertDetail;
    }

    async submitVerdict(alertId: string, verdict: Verdict, note = ""): Promise<void> {
        const response = await this.request(`/alerts/${encodeURIComponent(alertId)}/annotation`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ verdict, note }),
        });
        if (response.status === 409) {
            throw new ConflictError(`alert ${alertId} already annotated`);
        }
        if (response.status !== 204) {
            throw new Error(`annotation failed: ${response.status}`);
        }
    }

    async metrics(): Promise<Metrics> {
        const response = await this.request("/metrics");
        if (!response.ok) {
            throw new Error(`metrics failed: ${response.status}`);
        }
        return (await response.json()) as Metrics;
    }

    async startRun(config: Record<string, unknown>): Promise<string> {
        const response = await this.request("/runs", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(config),
        });
        if (response.status !== 202) {
            throw new Error(`startRun failed: ${response.status}`);
        }
        const body = (await response.json()) as { run_id: string };
        return body.run_id;
    }

    async runStatus(runId: string): Promise<{ status: string; error?: string }> {
        const response = await this.request(`/runs/${encodeURIComponent(runId)}`);
        if (!response.ok) {
            throw new Error(`runStatus failed: ${response.status}`);
        }
        return (await response.json()) as { status: string; error?: string };
    }
}

/**
 * One-flight guard: a verdict submission in progress swallows duplicate
 * clicks so double-submitting produces exactly one POST.
 */
export class VerdictSubmitter {
    private inFlight = new Set<string>();
    posts = 0;

    constructor(private readonly client: ApiClient) {}

    async submit(alertId: string, verdict: Verdict, note = ""): Promise<"submitted" | "duplicate"> {
        if (this.inFlight.has(alertId)) {
            return "duplicate";
        }
        this.inFlight.add(alertId);
        try {
            this.posts += 1;
            await this.client.submitVerdict(alertId, verdict, note);
            return "submitted";
        } finally {
            this.inFlight.delete(alertId);
        }
    }
}
