"""Service state: run records and alert records over durable stores.

State is an in-memory view rebuilt by replaying the append-only logs; every
mutation appends before the view updates, so acknowledged writes survive a
kill at any point.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path

from ..correlator import AlertGraph, Edge, EventGroup
from ..feedback import AnnotationError, FeedbackStores, Verdict, filter_known
from .checkpoints import signature_payload
from .store import JsonlStore

RUN_STATUS = ("pending", "running", "done", "failed")
ALERT_STATES = ("pending", "suppressed", "annotated")


@dataclass
class RunRecord:
    run_id: str
    config: dict
    status: str = "pending"
    report: dict | None = None
    error: str | None = None


@dataclass
class AlertRecord:
    alert_id: str
    run_id: str
    doc: dict
    timeline: dict
    signature: dict
    state: str = "pending"
    verdict: str | None = None
    matched_id: str | None = None


def _alert_from_doc(doc: dict, tau: float) -> AlertGraph:
    """Rebuild enough of an AlertGraph for signature/similarity work."""
    groups = []
    edges = []
    for i, e in enumerate(doc["edges"]):
        src_type = e["src"].split(":", 1)[0]
        dst_type = e["dst"].split(":", 1)[0]
        g = EventGroup(
            gid=i,
            label=e["group"]["label"],
            kind=e["group"]["kind"],
            template=(src_type, e["action"], dst_type),
            actor=e["group"]["label"].split(" ")[0],
            action=e["action"],
            resource=None,
            location="",
            src_entity=(src_type, e["src"]),
            dst_entity=(dst_type, e["dst"]),
            first_ts=e["ts"],
            last_ts=e["ts"],
            member_ids=list(e["group"]["member_ids"]),
            max_aggregate=e["incongruity"],
            per_field_max={e["group"]["attributed"]: e["incongruity"]}
            if e["group"].get("attributed") else {},
        )
        groups.append(g)
        edges.append(Edge(src=e["src"], dst=e["dst"], action=e["action"], ts=e["ts"],
                          group_index=i, incongruity=e["incongruity"], rarity=e["rarity"]))
    return AlertGraph(
        alert_id=doc["alert_id"],
        tau=tau,
        node_threats={n["key"]: n["threat"] for n in doc["nodes"]},
        node_labels={n["key"]: n["label"] for n in doc["nodes"]},
        edges=edges,
        groups=groups,
        created_ts=doc["created_ts"],
        pruned=doc.get("pruned", False),
    )


class ServiceState:
    """Single-writer durable view over a data directory."""

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self._lock = threading.RLock()
        self._runs_log = JsonlStore(self.data_dir / "runs.jsonl")
        self._alerts_log = JsonlStore(self.data_dir / "alerts.jsonl")
        self._annotations_log = JsonlStore(self.data_dir / "annotations.jsonl")
        self.runs: dict[str, RunRecord] = {}
        self.alerts: dict[str, AlertRecord] = {}
        self.stores = FeedbackStores()
        self._replay()

    def _replay(self) -> None:
        for rec in self._runs_log.load():
            run = self.runs.get(rec["run_id"])
            if run is None:
                run = RunRecord(run_id=rec["run_id"], config=rec.get("config", {}))
                self.runs[run.run_id] = run
            run.status = rec["status"]
            if rec.get("report") is not None:
                run.report = rec["report"]
            if rec.get("error") is not None:
                run.error = rec["error"]
        for rec in self._alerts_log.load():
            self.alerts[rec["alert_id"]] = AlertRecord(
                alert_id=rec["alert_id"],
                run_id=rec["run_id"],
                doc=rec["doc"],
                timeline=rec["timeline"],
                signature=rec["signature"],
                state=rec.get("state", "pending"),
                matched_id=rec.get("matched_id"),
            )
        for rec in self._annotations_log.load():
            alert = self.alerts.get(rec["alert_id"])
            if alert is None:
                continue
            self._apply_annotation(alert, Verdict(rec["verdict"], rec.get("note", "")), persist=False)

    # -- runs ------------------------------------------------------------

    def create_run(self, run_id: str, config: dict) -> RunRecord:
        with self._lock:
            if run_id in self.runs:
                raise ValueError(f"run {run_id} already exists")
            run = RunRecord(run_id=run_id, config=config)
            self.runs[run_id] = run
            self._runs_log.append({"run_id": run_id, "status": "pending", "config": config})
            return run

    def set_run_status(self, run_id: str, status: str, report: dict | None = None,
                       error: str | None = None) -> None:
        with self._lock:
            run = self.runs[run_id]
            order = RUN_STATUS.index
            if order(status) < order(run.status):
                raise ValueError(f"run {run_id}: cannot move {run.status} -> {status}")
            run.status = status
            run.report = report if report is not None else run.report
            run.error = error
            self._runs_log.append(
                {"run_id": run_id, "status": status, "report": report, "error": error}
            )

    # -- alerts ----------------------------------------------------------

    def ingest_alert(self, run_id: str, alert: AlertGraph, doc: dict, timeline: dict,
                     sigma: float = 0.8) -> AlertRecord:
        """Register one alert, filtering against the known-FP bases."""
        with self._lock:
            outcome = filter_known(alert, self.stores.fp_base, sigma, self.stores.authorized_base)
            state = "suppressed" if outcome.suppressed else "pending"
            from ..feedback import signature as compute_signature

            rec = AlertRecord(
                alert_id=alert.alert_id,
                run_id=run_id,
                doc=doc,
                timeline=timeline,
                signature=signature_payload(compute_signature(alert)),
                state=state,
                matched_id=outcome.matched_id if outcome.suppressed else None,
            )
            self.alerts[rec.alert_id] = rec
            self._alerts_log.append(
                {
                    "alert_id": rec.alert_id,
                    "run_id": run_id,
                    "doc": doc,
                    "timeline": timeline,
                    "signature": rec.signature,
                    "state": state,
                    "matched_id": rec.matched_id,
                }
            )
            return rec

    def _apply_annotation(self, alert: AlertRecord, verdict: Verdict, persist: bool) -> None:
        graph = _alert_from_doc(alert.doc, alert.doc.get("tau", 0.0))
        self.stores.annotate(graph, verdict, ts=alert.doc.get("created_ts", 0))
        alert.state = "annotated"
        alert.verdict = verdict.value
        if persist:
            self._annotations_log.append(
                {"alert_id": alert.alert_id, "verdict": verdict.value, "note": verdict.note}
            )

    def annotate(self, alert_id: str, verdict: Verdict) -> AlertRecord:
        with self._lock:
            alert = self.alerts.get(alert_id)
            if alert is None:
                raise KeyError(alert_id)
            if alert.state == "annotated":
                raise AnnotationError(f"alert {alert_id} already annotated")
            self._apply_annotation(alert, verdict, persist=True)
            return alert

    def pending_alerts(self) -> list[AlertRecord]:
        with self._lock:
            out = [a for a in self.alerts.values() if a.state == "pending"]
            out.sort(key=lambda a: (-a.doc.get("threat_score", 0.0), a.alert_id))
            return out

    def metrics(self) -> dict:
        with self._lock:
            events_per_s = None
            agent_score = None
            model_version = 0
            for run in self.runs.values():
                if run.report:
                    model_version += 1
                    wall = run.report.get("wall_clock_s") or 0
                    total = (run.report.get("benign_events") or 0) + (run.report.get("attack_events") or 0)
                    if wall and total:
                        events_per_s = total / wall
                    if run.report.get("agent_eval_score") is not None:
                        agent_score = run.report["agent_eval_score"]
            return {
                "events_per_s": events_per_s,
                "alerts_pending": len([a for a in self.alerts.values() if a.state == "pending"]),
                "fp_count": len(self.stores.fp_base.entries),
                "soc_count": len(self.stores.soc_queue),
                "agent_eval_score": agent_score,
                "model_version": model_version,
            }
