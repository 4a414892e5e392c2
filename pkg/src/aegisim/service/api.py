"""HTTP/JSON API over the service state.

Poll-based, single analyst, no auth. Scenario runs execute on a background
worker thread; POST /runs acknowledges as soon as the run record is durable.
"""

from __future__ import annotations

import json
import queue
import threading
from dataclasses import replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from ..feedback import AnnotationError, Verdict
from ..scenarios import PipelineConfig, ScenarioConfig, run_scenario
from ..lifegen import TopologyConfig
from .state import ServiceState


def scenario_config_from_doc(doc: dict) -> ScenarioConfig:
    doc = dict(doc)
    world = TopologyConfig(**doc.pop("world")) if "world" in doc else TopologyConfig()
    pipeline = PipelineConfig(**doc.pop("pipeline")) if "pipeline" in doc else PipelineConfig()
    if "hp" in doc:
        from ..detector import Hyperparams

        hp = doc.pop("hp")
        hp["hidden"] = tuple(hp.get("hidden", (48, 12)))
        pipeline = replace(pipeline, hp=Hyperparams(**hp))
    return ScenarioConfig(world=world, pipeline=pipeline, **doc)


class RunWorker:
    """Serialized background executor for scenario runs."""

    def __init__(self, state: ServiceState):
        self.state = state
        self.queue: queue.Queue = queue.Queue()
        self.thread = threading.Thread(target=self._loop, daemon=True)
        self.thread.start()

    def submit(self, run_id: str, cfg: ScenarioConfig) -> None:
        self.queue.put((run_id, cfg))

    def _loop(self) -> None:
        while True:
            run_id, cfg = self.queue.get()
            if run_id is None:
                return
            try:
                self.state.set_run_status(run_id, "running")
                report = run_scenario(cfg)
                doc = report.to_doc()
                from .state import _alert_from_doc

                for alert_doc, tl_doc in zip(doc["alerts"], doc["timelines"]):
                    graph = _alert_from_doc(alert_doc, alert_doc.get("tau", 0.0))
                    self.state.ingest_alert(run_id, graph, alert_doc, tl_doc)
                self.state.set_run_status(run_id, "done", report=doc)
            except Exception as exc:  # surfaces through GET /runs/{id}
                self.state.set_run_status(run_id, "failed", error=str(exc))


class ApiServer:
    def __init__(self, data_dir: Path, port: int = 0, host: str = "127.0.0.1"):
        self.state = ServiceState(data_dir)
        self.worker = RunWorker(self.state)
        state = self.state
        worker = self.worker

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, fmt, *args):  # quiet
                pass

            def _send(self, code: int, payload=None):
                body = b"" if payload is None else json.dumps(payload).encode()
                self.send_response(code)
                self.send_header("Access-Control-Allow-Origin", "*")
                self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
                self.send_header("Access-Control-Allow-Headers", "Content-Type")
                if body:
                    self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                if body:
                    self.wfile.write(body)

            def _body(self) -> dict:
                length = int(self.headers.get("Content-Length", 0))
                if length == 0:
                    return {}
                return json.loads(self.rfile.read(length))

            def do_OPTIONS(self):
                self._send(204)

            def do_GET(self):
                url = urlparse(self.path)
                parts = [p for p in url.path.split("/") if p]
                try:
                    if parts == ["metrics"]:
                        self._send(200, state.metrics())
                    elif parts == ["alerts"]:
                        wanted = parse_qs(url.query).get("state", ["pending"])[0]
                        records = [
                            a for a in state.alerts.values()
                            if wanted in ("all", a.state)
                        ]
                        records.sort(key=lambda a: (-a.doc.get("threat_score", 0.0), a.alert_id))
                        self._send(200, [
                            {
                                "alert_id": a.alert_id,
                                "run_id": a.run_id,
                                "state": a.state,
                                "verdict": a.verdict,
                                "threat_score": a.doc.get("threat_score"),
                                "created_ts": a.doc.get("created_ts"),
                                "nodes": len(a.doc.get("nodes", [])),
                            }
                            for a in records
                        ])
                    elif len(parts) == 2 and parts[0] == "alerts":
                        a = state.alerts.get(parts[1])
                        if a is None:
                            self._send(404, {"error": "unknown alert"})
                        else:
                            self._send(200, {
                                "alert_id": a.alert_id,
                                "run_id": a.run_id,
                                "state": a.state,
                                "verdict": a.verdict,
                                "graph": a.doc,
                                "timeline": a.timeline,
                                "score": a.doc.get("threat_score"),
                            })
                    elif len(parts) == 2 and parts[0] == "runs":
                        run = state.runs.get(parts[1])
                        if run is None:
                            self._send(404, {"error": "unknown run"})
                        else:
                            self._send(200, {
                                "run_id": run.run_id,
                                "status": run.status,
                                "config": run.config,
                                "report": run.report,
                                "error": run.error,
                            })
                    elif parts == ["runs"]:
                        self._send(200, [
                            {"run_id": r.run_id, "status": r.status}
                            for r in state.runs.values()
                        ])
                    else:
                        self._send(404, {"error": "no such endpoint"})
                except Exception as exc:
                    self._send(500, {"error": str(exc)})

            def do_POST(self):
                url = urlparse(self.path)
                parts = [p for p in url.path.split("/") if p]
                try:
                    if parts == ["runs"]:
                        doc = self._body()
                        cfg = scenario_config_from_doc(doc)
                        run_id = f"s{cfg.scenario_id}-seed{cfg.seed}-{len(state.runs):04d}"
                        state.create_run(run_id, doc)
                        worker.submit(run_id, cfg)
                        self._send(202, {"run_id": run_id})
                    elif len(parts) == 3 and parts[0] == "alerts" and parts[2] == "annotation":
                        doc = self._body()
                        verdict = Verdict(doc.get("verdict", ""), doc.get("note", ""))
                        state.annotate(parts[1], verdict)
                        self._send(204)
                    else:
                        self._send(404, {"error": "no such endpoint"})
                except KeyError:
                    self._send(404, {"error": "unknown alert"})
                except AnnotationError as exc:
                    self._send(409, {"error": str(exc)})
                except (ValueError, TypeError) as exc:
                    self._send(400, {"error": str(exc)})
                except Exception as exc:
                    self._send(500, {"error": str(exc)})

        self.httpd = ThreadingHTTPServer((host, port), Handler)
        self.port = self.httpd.server_address[1]

    def serve_forever(self):
        self.httpd.serve_forever()

    def start_background(self) -> threading.Thread:
        t = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        t.start()
        return t

    def shutdown(self):
        self.httpd.shutdown()
        self.httpd.server_close()


def serve(data_dir: Path, port: int, host: str = "127.0.0.1") -> ApiServer:
    """Start the API; mutations are durable before they are acknowledged."""
    data_dir = Path(data_dir)
    if not data_dir.exists():
        raise FileNotFoundError(f"data directory {data_dir} does not exist")
    return ApiServer(data_dir, port=port, host=host)
