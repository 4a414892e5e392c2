"""Command-line entry points."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..detector import Hyperparams
from ..events import write_events
from ..lifegen import TopologyConfig, build_world, step_benign
from ..scenarios import ScenarioConfig, run_scenario, train_recon_agent
from .api import scenario_config_from_doc, serve
from .state import ServiceState, _alert_from_doc


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _topology(doc: dict, seed: int | None) -> TopologyConfig:
    world = TopologyConfig(**doc.get("world", {}))
    if seed is not None:
        from dataclasses import replace

        world = replace(world, seed=seed)
    return world


def cmd_simulate(args) -> int:
    doc = _load_config(args.config)
    world = build_world(_topology(doc, args.seed))
    events = step_benign(world, args.duration)
    write_events(args.out, events)
    print(f"wrote {len(events)} events to {args.out}")
    return 0


def cmd_train_detector(args) -> int:
    from ..events import read_events
    from ..lifegen import sensor_schemas
    from ..detector import fit_bank
    from .checkpoints import save_bank

    doc = _load_config(args.config)
    hp_doc = doc.get("hp", {})
    hp_doc.setdefault("hidden", (48, 12))
    hp_doc["hidden"] = tuple(hp_doc["hidden"])
    if args.seed is not None:
        hp_doc["seed"] = args.seed
    events = read_events(args.events)
    bank, _ = fit_bank(events, sensor_schemas(), Hyperparams(**hp_doc))
    save_bank(Path(args.out), bank)
    for source, model in sorted(bank.models.items()):
        print(f"{source}: stopped epoch {model.log.stopped_epoch}, "
              f"best val loss {model.log.best_val_loss:.4f}")
    print(f"saved detector bank to {args.out}")
    return 0


def cmd_train_agent(args) -> int:
    from .checkpoints import save_policy

    doc = _load_config(args.config)
    world = build_world(_topology(doc, args.seed))
    cfg = ScenarioConfig(scenario_id=1, seed=args.seed or 0,
                         agent_episodes=args.episodes)
    policy = train_recon_agent(world, cfg)
    save_policy(Path(args.out), policy)
    print(f"trained {policy.episodes_trained} episodes; saved policy to {args.out}")
    return 0


def cmd_run_scenario(args) -> int:
    doc = _load_config(args.config)
    doc["scenario_id"] = args.id
    if args.seed is not None:
        doc["seed"] = args.seed
    cfg = scenario_config_from_doc(doc)
    agent = None
    if args.agent:
        from .checkpoints import load_policy

        agent = load_policy(Path(args.agent))
    report = run_scenario(cfg, agent=agent)
    report_doc = report.to_doc()
    if args.data:
        state = ServiceState(Path(args.data))
        state.create_run(report.run_id, doc)
        state.set_run_status(report.run_id, "running")
        for alert_doc, tl_doc in zip(report_doc["alerts"], report_doc["timelines"]):
            graph = _alert_from_doc(alert_doc, alert_doc.get("tau", 0.0))
            state.ingest_alert(report.run_id, graph, alert_doc, tl_doc)
        state.set_run_status(report.run_id, "done", report=report_doc)
    summary = {
        "run_id": report.run_id,
        "alerts": len(report_doc["alerts"]),
        "recall": report_doc["recall"],
        "precision": report_doc["precision"],
        "coverage": report_doc["coverage"],
        "poisoning": report_doc["poisoning"],
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_serve(args) -> int:
    data = Path(args.data)
    data.mkdir(parents=True, exist_ok=True)
    server = serve(data, args.port, host=args.host)
    print(f"serving on http://{args.host}:{server.port} (data: {data})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


def cmd_report(args) -> int:
    from .report import write_report

    state = ServiceState(Path(args.data))
    written = write_report(state, args.run, args.format, Path(args.out))
    for path in written:
        print(path)
    return 0


def main(argv=None) -> int:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="global seed override")
    common.add_argument("--config", default=None, help="JSON config file")
    parser = argparse.ArgumentParser(prog="aegisim", parents=[common],
                                     description="UEBA defense vs red-team simulation platform")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = add("simulate", help="generate benign life traffic")
    p.add_argument("--duration", type=float, default=10.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = add("train-detector", help="fit the behaviour models")
    p.add_argument("--events", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_detector)

    p = add("train-agent", help="train the recon policy")
    p.add_argument("--episodes", type=int, default=600)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_agent)

    p = add("run-scenario", help="run a validation scenario")
    p.add_argument("--id", type=int, required=True, choices=(1, 2, 3))
    p.add_argument("--agent", default=None, help="policy checkpoint")
    p.add_argument("--data", default=None, help="persist results to this data dir")
    p.set_defaults(func=cmd_run_scenario)

    p = add("serve", help="run the HTTP/JSON API")
    p.add_argument("--port", type=int, default=8642)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_serve)

    p = add("report", help="export a finished run")
    p.add_argument("--run", required=True)
    p.add_argument("--format", choices=("dot", "json"), default="json")
    p.add_argument("--data", required=True)
    p.add_argument("--out", default="reports")
    p.set_defaults(func=cmd_report)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
