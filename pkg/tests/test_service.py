"""Service layer: stores, checkpoints, HTTP API, CLI, reports."""

import json
import subprocess
import sys
import time
import urllib.error
import urllib.request
import numpy as np
import pytest

from aegisim.feedback import EpisodicMemory, FeedbackStores, Verdict
from aegisim.service import (
    JsonlStore,
    ServiceState,
    StoreError,
    load_bank,
    load_checkpoint,
    load_memory,
    load_policy,
    save_bank,
    save_checkpoint,
    save_memory,
    save_policy,
    serve,
    stores_from_payload,
    stores_payload,
    write_report,
)
from tests.test_feedback import alert_from_pairs, mk_event, PAIRS


class TestJsonlStore:
    def test_append_load_round_trip(self, tmp_path):
        store = JsonlStore(tmp_path / "x.jsonl")
        store.append({"a": 1})
        store.append({"b": [1, 2]})
        assert store.load() == [{"a": 1}, {"b": [1, 2]}]

    def test_survives_reopen(self, tmp_path):
        store = JsonlStore(tmp_path / "x.jsonl")
        store.append({"a": 1})
        again = JsonlStore(tmp_path / "x.jsonl")
        assert again.load() == [{"a": 1}]


class TestCheckpoints:
    def test_detector_round_trip_identical_scores(self, tmp_path, fitted_bank, held_out_scored):
        bank, _ = fitted_bank
        save_bank(tmp_path / "bank.json", bank)
        loaded = load_bank(tmp_path / "bank.json")
        scored, _ = held_out_scored
        probe = [s.event for s in scored[:100]]
        a, _ = bank.score_stream(probe)
        b, _ = loaded.score_stream(probe)
        for x, y in zip(a, b):
            assert x.score == y.score

    def test_truncated_checkpoint_detected(self, tmp_path, fitted_bank):
        bank, _ = fitted_bank
        path = tmp_path / "bank.json"
        save_bank(path, bank)
        blob = path.read_text()
        path.write_text(blob[: len(blob) // 2])
        with pytest.raises(StoreError):
            load_bank(path)

    def test_schema_version_mismatch_is_explicit(self, tmp_path):
        path = tmp_path / "thing.json"
        save_checkpoint(path, "thing", {"x": 1})
        doc = json.loads(path.read_text())
        doc["schema_version"] = 999
        path.write_text(json.dumps(doc))
        with pytest.raises(StoreError, match="schema version"):
            load_checkpoint(path, "thing")

    def test_tampered_payload_fails_checksum(self, tmp_path):
        path = tmp_path / "thing.json"
        save_checkpoint(path, "thing", {"x": 1})
        doc = json.loads(path.read_text())
        doc["payload"]["x"] = 2
        path.write_text(json.dumps(doc))
        with pytest.raises(StoreError, match="checksum"):
            load_checkpoint(path, "thing")

    def test_policy_round_trip_identical_actions(self, tmp_path, trained_policy, small_world):
        from aegisim.redteam import ReconEnv, RewardConfig, act, recon_dictionary

        save_policy(tmp_path / "pol.json", trained_policy)
        loaded = load_policy(tmp_path / "pol.json")
        env = ReconEnv(small_world.copy(), recon_dictionary(), RewardConfig(),
                       actor="PC01/rat", episode_len=30)
        s = env.reset()
        mask = env.valid_mask()
        for seed in range(20):
            a = act(trained_policy, s, 0.0, mask, np.random.default_rng(seed))
            b = act(loaded, s, 0.0, mask, np.random.default_rng(seed))
            assert a == b

    def test_memory_round_trip_continues_identically(self, tmp_path):
        mem = EpisodicMemory(capacity=10, seed=9)
        for i in range(200):
            mem.insert(mk_event(i), 0.1, ceiling=0.9)
        save_memory(tmp_path / "mem.json", mem)
        twin = load_memory(tmp_path / "mem.json")
        for i in range(200, 400):
            mem.insert(mk_event(i), 0.1, ceiling=0.9)
            twin.insert(mk_event(i), 0.1, ceiling=0.9)
        assert [e.id for e in mem.events] == [e.id for e in twin.events]

    def test_stores_round_trip(self):
        stores = FeedbackStores()
        stores.annotate(alert_from_pairs(PAIRS, alert_id="x1"), Verdict("false_positive", "n"))
        stores.annotate(alert_from_pairs(PAIRS[:1], alert_id="x2"), Verdict("true_positive"))
        twin = stores_from_payload(stores_payload(stores))
        assert twin.soc_queue == stores.soc_queue
        assert twin.annotated == stores.annotated
        assert twin.fp_base.entries == stores.fp_base.entries


MINI_RUN = {
    "scenario_id": 2,
    "seed": 1,
    "warmup_s": 12.0,
    "agent_episodes": 40,
    "recon_actions": 12,
    "world": {"zone_sizes": {"1": 2, "2": 1, "3": 3, "4": 1, "5": 1, "6": 1}, "seed": 5},
}


@pytest.fixture(scope="module")
def live_service(tmp_path_factory):
    data = tmp_path_factory.mktemp("svc")
    server = serve(data, 0)
    server.start_background()
    base = f"http://127.0.0.1:{server.port}"

    def req(method, path, body=None):
        data_ = json.dumps(body).encode() if body is not None else None
        r = urllib.request.Request(base + path, data=data_, method=method,
                                   headers={"Content-Type": "application/json"})
        try:
            with urllib.request.urlopen(r) as resp:
                raw = resp.read()
                return resp.status, json.loads(raw) if raw else None
        except urllib.error.HTTPError as e:
            raw = e.read()
            return e.code, json.loads(raw) if raw else None

    code, out = req("POST", "/runs", MINI_RUN)
    assert code == 202
    run_id = out["run_id"]
    for _ in range(600):
        code, run = req("GET", f"/runs/{run_id}")
        if run["status"] in ("done", "failed"):
            break
        time.sleep(0.25)
    assert run["status"] == "done", run.get("error")
    yield server, req, run_id, data
    server.shutdown()


class TestApi:
    def test_fresh_store_empty_pending(self, tmp_path):
        server = serve(tmp_path, 0)
        server.start_background()
        with urllib.request.urlopen(f"http://127.0.0.1:{server.port}/alerts?state=pending") as r:
            assert json.loads(r.read()) == []
        server.shutdown()

    def test_missing_data_dir_rejected(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            serve(tmp_path / "nope", 0)

    def test_run_report_through_api(self, live_service):
        _, req, run_id, _ = live_service
        code, run = req("GET", f"/runs/{run_id}")
        assert code == 200
        assert run["report"]["recall"] >= 0.95
        assert len(run["report"]["alerts"]) == 1

    def test_alert_detail_and_annotation_round_trip(self, live_service):
        _, req, run_id, _ = live_service
        code, alerts = req("GET", "/alerts?state=pending")
        assert code == 200 and len(alerts) == 1
        aid = alerts[0]["alert_id"]
        code, detail = req("GET", f"/alerts/{aid}")
        assert code == 200
        assert detail["graph"]["nodes"] and detail["timeline"]["entries"]
        code, _ = req("POST", f"/alerts/{aid}/annotation",
                      {"verdict": "false_positive", "note": "drill"})
        assert code == 204
        code, detail = req("GET", f"/alerts/{aid}")
        assert detail["state"] == "annotated" and detail["verdict"] == "false_positive"
        code, metrics = req("GET", "/metrics")
        assert metrics["fp_count"] == 1
        assert metrics["alerts_pending"] == 0
        # second annotation conflicts
        code, _ = req("POST", f"/alerts/{aid}/annotation", {"verdict": "true_positive"})
        assert code == 409

    def test_unknown_routes(self, live_service):
        _, req, _, _ = live_service
        assert req("GET", "/alerts/zzz")[0] == 404
        assert req("GET", "/nope")[0] == 404
        assert req("POST", "/alerts/zzz/annotation", {"verdict": "true_positive"})[0] == 404
        assert req("POST", "/runs", {"scenario_id": 9})[0] == 400

    def test_durability_across_restart(self, live_service):
        _, req, run_id, data = live_service
        twin = ServiceState(data)
        assert twin.runs[run_id].status == "done"
        assert len(twin.stores.fp_base.entries) == 1
        states = {a.state for a in twin.alerts.values()}
        assert states == {"annotated"}

    def test_report_files(self, live_service, tmp_path):
        server, req, run_id, data = live_service
        state = ServiceState(data)
        written = write_report(state, run_id, "dot", tmp_path / "out")
        dot = next(p for p in written if p.suffix == ".dot").read_text()
        _assert_dot_parses(dot)
        tl = next(p for p in written if p.name.endswith("-timeline.json"))
        entries = json.loads(tl.read_text())["entries"]
        blob = " ".join(e["label"] + " " + e["host"] for e in entries)
        assert "45.251.23.2" in blob
        metrics = json.loads(next(p for p in written if p.name.endswith("-metrics.json")).read_text())
        code, run = req("GET", f"/runs/{run_id}")
        assert metrics["recall"] == run["report"]["recall"]
        assert metrics["precision"] == run["report"]["precision"]

    def test_unknown_run_report(self, live_service, tmp_path):
        from aegisim.service import ReportError

        _, _, _, data = live_service
        state = ServiceState(data)
        with pytest.raises(ReportError):
            write_report(state, "ghost", "json", tmp_path)


def _assert_dot_parses(text: str) -> None:
    """Minimal DOT grammar check: digraph header, quoted ids, balanced
    braces, every edge references declared nodes."""
    lines = [l.strip() for l in text.strip().splitlines()]
    assert lines[0].startswith("digraph") and lines[0].endswith("{")
    assert lines[-1] == "}"
    declared = set()
    edges = []
    for line in lines[1:-1]:
        if not line or line.startswith("rankdir"):
            continue
        assert line.endswith(";")
        if " -> " in line:
            src, rest = line.split(" -> ", 1)
            dst = rest.split(" [", 1)[0]
            edges.append((src.strip(), dst.strip()))
        elif line.startswith('"'):
            declared.add(line.split(" [", 1)[0].strip())
    for src, dst in edges:
        assert src in declared and dst in declared


class TestCli:
    def run_cli(self, *args):
        return subprocess.run([sys.executable, "-m", "aegisim.service.cli", *args],
                              capture_output=True, text=True, timeout=500)

    def test_simulate_writes_events(self, tmp_path):
        out = tmp_path / "events.jsonl"
        res = self.run_cli("simulate", "--duration", "2", "--out", str(out), "--seed", "3")
        assert res.returncode == 0, res.stderr
        lines = out.read_text().strip().splitlines()
        assert len(lines) > 1000
        from aegisim.events import parse_event

        parse_event(lines[0])

    def test_full_cli_flow(self, tmp_path):
        events = tmp_path / "events.jsonl"
        assert self.run_cli("simulate", "--duration", "8", "--out", str(events),
                            "--seed", "4").returncode == 0
        bank_path = tmp_path / "bank.json"
        res = self.run_cli("train-detector", "--events", str(events), "--out", str(bank_path))
        assert res.returncode == 0, res.stderr
        assert load_bank(bank_path).models

        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(MINI_RUN))
        data = tmp_path / "data"
        res = self.run_cli("--config", str(cfg), "run-scenario", "--id", "2",
                           "--data", str(data))
        assert res.returncode == 0, res.stderr
        summary = json.loads(res.stdout)
        assert summary["alerts"] == 1
        res = self.run_cli("report", "--run", summary["run_id"], "--format", "json",
                           "--data", str(data), "--out", str(tmp_path / "rep"))
        assert res.returncode == 0, res.stderr
        assert (tmp_path / "rep" / f"{summary['run_id']}.json").exists()


class TestSuppression:
    def test_known_fp_lookalike_is_suppressed_on_ingest(self, tmp_path):
        """A re-raised alert matching a ruled FP never reaches the queue,
        and the suppression is recorded, not silent."""
        import dataclasses

        from aegisim.correlator import alert_to_doc, timeline, Timeline
        from aegisim.correlator.export import timeline_to_doc

        state = ServiceState(tmp_path)
        first = alert_from_pairs(PAIRS, alert_id="run-a001")
        doc = alert_to_doc(first)
        tl = timeline_to_doc(Timeline(alert_id=first.alert_id, entries=()))
        state.ingest_alert("run1", first, doc, tl)
        assert state.pending_alerts()[0].alert_id == "run-a001"
        state.annotate("run-a001", Verdict("false_positive", "known noise"))

        twin = alert_from_pairs(PAIRS, alert_id="run-a002")
        rec = state.ingest_alert("run2", twin, alert_to_doc(twin), tl)
        assert rec.state == "suppressed"
        assert rec.matched_id == "run-a001"
        assert [a.alert_id for a in state.pending_alerts()] == []
        assert state.metrics()["alerts_pending"] == 0

        # durable across restart
        again = ServiceState(tmp_path)
        assert again.alerts["run-a002"].state == "suppressed"

    def test_soc_count_in_metrics(self, tmp_path):
        from aegisim.correlator import alert_to_dot, alert_to_doc, Timeline
        from aegisim.correlator.export import timeline_to_doc

        state = ServiceState(tmp_path)
        alert = alert_from_pairs(PAIRS, alert_id="run-b001")
        tl = timeline_to_doc(Timeline(alert_id=alert.alert_id, entries=()))
        state.ingest_alert("run1", alert, alert_to_doc(alert), tl)
        state.annotate("run-b001", Verdict("true_positive", "confirmed"))
        assert state.metrics()["soc_count"] == 1
