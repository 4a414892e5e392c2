// Pure string rendering: SVG for the alert DAG, HTML for the queue and the
// major-event timeline strip. Keeping these DOM-free makes them testable
// anywhere; app.ts only glues strings into the page.

import { layout } from "./layout.js";
import type { AlertSummary, GraphDoc, TimelineDoc } from "./types.js";

export function threatColor(threat: number): string {
    // monotone ramp: pale amber (harmless) to deep red (threat 1.0)
    const t = Math.min(1, Math.max(0, threat));
    const r = Math.round(250 - 60 * t);
    const g = Math.round(225 - 180 * t);
    const b = Math.round(160 - 120 * t);
    return `rgb(${r},${g},${b})`;
}

function escapeXml(raw: string): string {
    return raw
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

export function renderGraphSvg(doc: GraphDoc): string {
    const placed = layout(doc);
    const parts: string[] = [];
    parts.push(
        `<svg xmlns="http://www.w3.org/2000/svg" class="alert-graph" ` +
        `viewBox="0 0 ${placed.width} ${placed.height}" data-alert="${escapeXml(doc.alert_id)}">`,
    );
    parts.push(
        `<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" ` +
        `markerWidth="7" markerHeight="7" orient="auto-start-reverse">` +
        `<path d="M 0 0 L 10 5 L 0 10 z" fill="#666"/></marker></defs>`,
    );
    for (const edge of doc.edges) {
        const a = placed.nodes.get(edge.src);
        const b = placed.nodes.get(edge.dst);
        if (!a || !b) {
            continue;
        }
        parts.push(
            `<g class="edge"><line x1="${a.x}" y1="${a.y + 16}" x2="${b.x}" y2="${b.y - 18}" ` +
            `stroke="#666" stroke-width="1.2" marker-end="url(#arrow)"/>` +
            `<text x="${(a.x + b.x) / 2}" y="${(a.y + b.y) / 2}" class="edge-label" ` +
            `font-size="9" fill="#444">${escapeXml(edge.action)}</text></g>`,
        );
    }
    for (const node of placed.nodes.values()) {
        parts.push(
            `<g class="node" data-key="${escapeXml(node.key)}" data-threat="${node.threat.toFixed(4)}">` +
            `<circle cx="${node.x}" cy="${node.y}" r="16" fill="${threatColor(node.threat)}" ` +
            `stroke="#333"/>` +
            `<text x="${node.x}" y="${node.y + 30}" text-anchor="middle" font-size="10">` +
            `${escapeXml(node.label)}</text></g>`,
        );
    }
    parts.push("</svg>");
    return parts.join("");
}

export function renderTimeline(doc: TimelineDoc): string {
    if (doc.entries.length === 0) {
        return `<div class="timeline empty">no major events</div>`;
    }
    const buckets = new Map<number, typeof doc.entries>();
    for (const entry of doc.entries) {
        if (!buckets.has(entry.bucket_ts)) {
            buckets.set(entry.bucket_ts, []);
        }
        buckets.get(entry.bucket_ts)?.push(entry);
    }
    const parts: string[] = [`<div class="timeline" data-alert="${escapeXml(doc.alert_id)}">`];
    for (const [bucket, entries] of [...buckets.entries()].sort((x, y) => x[0] - y[0])) {
        const stamp = new Date(bucket).toISOString().slice(11, 16);
        parts.push(`<div class="bucket"><span class="bucket-ts">${stamp}</span><ul>`);
        for (const entry of entries) {
            parts.push(
                `<li class="tl-entry" data-threat="${entry.threat.toFixed(4)}">` +
                `<span class="host">${escapeXml(entry.host)}</span> ` +
                `<span class="label">${escapeXml(entry.label)}</span></li>`,
            );
        }
        parts.push("</ul></div>");
    }
    parts.push("</div>");
    return parts.join("");
}

export function renderQueue(alerts: AlertSummary[], socCount = 0): string {
    const badge = socCount > 0 ? `<span class="soc-badge">SOC alerts: ${socCount}</span>` : "";
    if (alerts.length === 0) {
        return `<div class="queue empty">${badge}no pending alerts — all clear</div>`;
    }
    const rows = alerts
        .map(
            (alert) =>
                `<tr class="alert-row" data-alert="${escapeXml(alert.alert_id)}">` +
                `<td>${escapeXml(alert.alert_id)}</td>` +
                `<td class="score">${alert.threat_score.toFixed(4)}</td>` +
                `<td>${alert.nodes}</td>` +
                `<td>${new Date(alert.created_ts).toISOString()}</td></tr>`,
        )
        .join("");
    return (
        `<div class="queue">${badge}<table><thead>` +
        `<tr><th>alert</th><th>score</th><th>nodes</th><th>first seen</th></tr>` +
        `</thead><tbody>${rows}</tbody></table></div>`
    );
}

export function renderBanner(message: string): string {
    return `<div class="banner error">${escapeXml(message)}</div>`;
}
