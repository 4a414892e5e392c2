"""Run report exports: DOT alert graphs, timeline documents, metric summaries."""

from __future__ import annotations

import json
from pathlib import Path

from ..correlator.export import alert_to_dot
from .state import ServiceState, _alert_from_doc


class ReportError(ValueError):
    pass


def _dot_from_doc(doc: dict) -> str:
    return alert_to_dot(_alert_from_doc(doc, doc.get("tau", 0.0)))


def write_report(state: ServiceState, run_id: str, fmt: str, out_dir: Path) -> list[Path]:
    """Emit the run's alert graphs, timelines and metrics summary."""
    run = state.runs.get(run_id)
    if run is None:
        raise ReportError(f"unknown run {run_id}")
    if run.status != "done" or run.report is None:
        raise ReportError(f"run {run_id} is not done (status {run.status})")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    report = run.report
    if fmt == "dot":
        for doc in report.get("alerts", []):
            path = out_dir / f"{doc['alert_id']}.dot"
            path.write_text(_dot_from_doc(doc), encoding="utf-8")
            written.append(path)
    elif fmt == "json":
        path = out_dir / f"{run_id}.json"
        path.write_text(json.dumps(report, indent=2, sort_keys=True), encoding="utf-8")
        written.append(path)
    else:
        raise ReportError(f"unknown format {fmt!r}")
    if report.get("episode_trace"):
        path = out_dir / f"{run_id}-trace.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            for row in report["episode_trace"]:
                fh.write(json.dumps(row, sort_keys=True) + "\n")
        written.append(path)
    for tl in report.get("timelines", []):
        path = out_dir / f"{tl['alert_id']}-timeline.json"
        path.write_text(json.dumps(tl, indent=2, sort_keys=True), encoding="utf-8")
        written.append(path)
    metrics = {
        "run_id": run_id,
        "recall": report.get("recall"),
        "precision": report.get("precision"),
        "latency_ms": report.get("latency_ms"),
        "alerts": len(report.get("alerts", [])),
        "benign_events": report.get("benign_events"),
        "attack_events": report.get("attack_events"),
        "coverage": report.get("coverage"),
        "efficiency": report.get("efficiency"),
    }
    path = out_dir / f"{run_id}-metrics.json"
    path.write_text(json.dumps(metrics, indent=2, sort_keys=True), encoding="utf-8")
    written.append(path)
    return written
