// Browser glue: polling queue, detail panel, verdict controls. Optimistic
// about nothing: the server's answers are the only source of truth.

import { ApiClient, ConflictError, ServiceUnreachable, VerdictSubmitter } from "./api.js";
import { renderBanner, renderGraphSvg, renderQueue, renderTimeline } from "./render.js";
import type { Verdict } from "./types.js";

const POLL_INTERVAL_MS = 3000;

export function startConsole(root: HTMLElement, baseUrl: string): { stop: () => void } {
    const client = new ApiClient(baseUrl);
    const submitter = new VerdictSubmitter(client);
    root.innerHTML = `
      <header><h1>alert triage</h1><div id="banner"></div></header>
      <main>
        <section id="queue"></section>
        <section id="detail" hidden>
          <div id="summary"></div>
          <div id="graph"></div>
          <div id="timeline"></div>
          <div id="verdicts">
            <button data-verdict="true_positive">true positive</button>
            <button data-verdict="false_positive">false positive</button>
            <button data-verdict="authorized_anomaly">authorized anomaly</button>
            <input id="note" placeholder="analyst note"/>
          </div>
        </section>
      </main>`;
    const queueEl = root.querySelector("#queue") as HTMLElement;
    const bannerEl = root.querySelector("#banner") as HTMLElement;
    const detailEl = root.querySelector("#detail") as HTMLElement;
    let selected: string | null = null;
    let timer: ReturnType<typeof setInterval> | null = null;

    async function refresh(): Promise<void> {
        try {
            const [alerts, metrics] = await Promise.all([client.listAlerts(), client.metrics()]);
            bannerEl.innerHTML = "";
            queueEl.innerHTML = renderQueue(alerts, metrics.soc_count);
            for (const row of queueEl.querySelectorAll<HTMLElement>(".alert-row")) {
                row.addEventListener("click", () => {
                    void select(row.dataset.alert as string);
                });
            }
            if (selected && !alerts.some((a) => a.alert_id === selected)) {
                detailEl.hidden = true;
                selected = null;
            }
        } catch (err) {
            if (err instanceof ServiceUnreachable) {
                bannerEl.innerHTML = renderBanner("service unreachable — retrying");
            } else {
                bannerEl.innerHTML = renderBanner(String(err));
            }
        }
    }

    async function select(alertId: string): Promise<void> {
        const detail = await client.getAlert(alertId);
        selected = alertId;
        detailEl.hidden = false;
        (root.querySelector("#summary") as HTMLElement).innerHTML =
            `<h2>${detail.alert_id}</h2><p>score ${detail.score.toFixed(4)} — state ${detail.state}</p>`;
        (root.querySelector("#graph") as HTMLElement).innerHTML = renderGraphSvg(detail.graph);
        (root.querySelector("#timeline") as HTMLElement).innerHTML = renderTimeline(detail.timeline);
    }

    for (const button of root.querySelectorAll<HTMLButtonElement>("#verdicts button")) {
        button.addEventListener("click", () => {
            if (!selected) {
                return;
            }
            const note = (root.querySelector("#note") as HTMLInputElement).value;
            void submitter
                .submit(selected, button.dataset.verdict as Verdict, note)
                .then((outcome) => {
                    if (outcome === "submitted") {
                        detailEl.hidden = true;
                        selected = null;
                        return refresh();
                    }
                    return undefined;
                })
                .catch((err) => {
                    bannerEl.innerHTML = renderBanner(
                        err instanceof ConflictError ? "already annotated elsewhere" : String(err),
                    );
                    return refresh();
                });
        });
    }

    void refresh();
    timer = setInterval(() => void refresh(), POLL_INTERVAL_MS);
    return {
        stop: () => {
            if (timer) {
                clearInterval(timer);
            }
        },
    };
}
