"""Orchestration of the three validation scenarios.

Scenario 1: defense installed but silent; the agent's coverage report is the
deliverable. Scenario 2: frozen defense versus the scripted kill chain.
Scenario 3: continually learning defense versus the frog-boiling schedule,
run as a controlled two-arm experiment (poisoning guard off, then on).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from ..correlator import alert_to_doc, timeline_to_doc
from ..detector import incremental_update
from ..detector.bank import DetectorBank
from ..events import Event, encode_batch
from ..feedback import EpisodicMemory, FeedbackStores, filter_known, poisoning_guard
from ..lifegen import (
    ATTACKER_ADDRESS,
    TopologyConfig,
    World,
    build_world,
    execute,
    step_benign,
    truth,
    visible_to_defender,
)
from ..redteam import (
    Policy,
    ReconEnv,
    RewardConfig,
    TrainConfig,
    coverage,
    efficiency,
    recon_dictionary,
    train,
)
from .killchain import killchain_attack
from .pipeline import DefensePipeline, PipelineConfig, warmup_pipeline
from .poison import full_attack_profile, poison_schedule

DEFENSE_MODES = {1: "inactive", 2: "frozen", 3: "continual"}


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    scenario_id: int
    world: TopologyConfig = TopologyConfig()
    seed: int = 0
    defense_mode: str = ""
    warmup_s: float = 60.0
    recon_actions: int = 40
    benign_gap_s: float = 2.0
    agent_episodes: int = 600
    pipeline: PipelineConfig = PipelineConfig()
    poison_steps: int = 8
    poison_exponent: float = 1.0
    poison_repeats: int = 12
    poison_benign_s: float = 0.5
    update_steps: int = 100
    replay_ratio: float = 0.4
    memory_capacity: int = 2000

    def __post_init__(self):
        if self.scenario_id not in DEFENSE_MODES:
            raise ScenarioError(f"unknown scenario {self.scenario_id}")
        expected = DEFENSE_MODES[self.scenario_id]
        if self.defense_mode and self.defense_mode != expected:
            raise ScenarioError(
                f"scenario {self.scenario_id} requires defense mode {expected!r}"
            )

    @property
    def mode(self) -> str:
        return DEFENSE_MODES[self.scenario_id]


@dataclass
class RunReport:
    run_id: str
    scenario_id: int
    seed: int
    benign_events: int = 0
    attack_events: int = 0
    tau: float | None = None
    ceiling: float | None = None
    coverage: float | None = None
    efficiency: float | None = None
    exposure: list[str] = field(default_factory=list)
    alerts: list[dict] = field(default_factory=list)
    timelines: list[dict] = field(default_factory=list)
    suppressed: list[dict] = field(default_factory=list)
    recall: float | None = None
    precision: float | None = None
    latency_ms: int | None = None
    evaded: bool | None = None
    episode_trace: list = field(default_factory=list)
    phase_labels: dict = field(default_factory=dict)
    poisoning: dict = field(default_factory=dict)
    agent_eval_score: float | None = None
    wall_clock_s: float = 0.0

    def to_doc(self) -> dict:
        return {
            "run_id": self.run_id,
            "scenario_id": self.scenario_id,
            "seed": self.seed,
            "benign_events": self.benign_events,
            "attack_events": self.attack_events,
            "tau": self.tau,
            "ceiling": self.ceiling,
            "coverage": self.coverage,
            "efficiency": self.efficiency,
            "exposure": list(self.exposure),
            "alerts": self.alerts,
            "timelines": self.timelines,
            "suppressed": self.suppressed,
            "recall": self.recall,
            "precision": self.precision,
            "latency_ms": self.latency_ms,
            "evaded": self.evaded,
            "episode_trace": self.episode_trace,
            "phase_labels": self.phase_labels,
            "poisoning": self.poisoning,
            "agent_eval_score": self.agent_eval_score,
            "wall_clock_s": self.wall_clock_s,
        }


def train_recon_agent(world: World, cfg: ScenarioConfig) -> Policy:
    pc = sorted(h.id for h in world.zone_hosts(3))[0]
    d = recon_dictionary()
    rc = RewardConfig()

    def env_factory(i: int) -> ReconEnv:
        return ReconEnv(world.copy(), d, rc, actor=f"{pc}/rat", episode_len=100)

    return train(env_factory, TrainConfig(episodes=cfg.agent_episodes, seed=cfg.seed))


def evaluate_detection(alerts: list, labels: dict[str, str], attack_start_ts: int | None):
    """(recall, precision, first-detection latency) against phase ground truth."""
    if not labels:
        raise ScenarioError("empty ground truth")
    gt = set(labels)
    members: set = set()
    for a in alerts:
        members.update(a.member_event_ids)
    hit = len(gt & members)
    recall = hit / len(gt)
    precision = hit / len(members) if members else 0.0
    latency = None
    if alerts and attack_start_ts is not None:
        latency = min(a.created_ts for a in alerts) - attack_start_ts
    return recall, precision, latency


def _run_scenario_1(cfg: ScenarioConfig, agent: Policy, report: RunReport) -> RunReport:
    world = build_world(replace(cfg.world, seed=cfg.world.seed + cfg.seed))
    env = ReconEnv(world.copy(), recon_dictionary(), RewardConfig(),
                   actor=ATTACKER_ADDRESS, episode_len=100)
    rng_seed = cfg.seed + 555
    from ..redteam import act as act_fn

    rng = np.random.default_rng(rng_seed)
    s = env.reset()
    done = False
    while not done:
        a = act_fn(agent, s, 0.0, env.valid_mask(), rng)
        s, _, done, _ = env.step(a)
    t = truth(world)
    report.coverage = coverage(env.knowledge, t)
    report.efficiency = efficiency(env.trace())
    report.exposure = sorted(env.knowledge.truth_keys() & t.keys())
    report.agent_eval_score = env.trace().score
    trace = env.trace()
    report.episode_trace = [
        {"step": i, "action": a, "new_findings": n, "reward": r}
        for i, (a, n, r) in enumerate(zip(trace.actions, trace.new_keys_per_step, trace.rewards))
    ]
    return report


def _run_scenario_2(cfg: ScenarioConfig, agent: Policy, report: RunReport) -> RunReport:
    world = build_world(replace(cfg.world, seed=cfg.world.seed + cfg.seed))
    warmup = step_benign(world, cfg.warmup_s)
    pipeline = warmup_pipeline(world, warmup, cfg.pipeline)
    trace = killchain_attack(world, agent, recon_actions=cfg.recon_actions,
                             benign_gap_s=cfg.benign_gap_s, seed=cfg.seed)
    window = [e for e in trace.events if visible_to_defender(world, e)]
    det = pipeline.detect(window, run_id=report.run_id)
    stores = FeedbackStores()
    alerts = []
    for a in det.alerts:
        outcome = filter_known(a, stores.fp_base, authorized=stores.authorized_base)
        if outcome.suppressed:
            report.suppressed.append({"alert_id": a.alert_id, "matched": outcome.matched_id})
        else:
            alerts.append(a)
    recall, precision, latency = evaluate_detection(alerts, trace.labels, trace.attack_start_ts)
    report.benign_events = len(warmup) + len(window) - len(trace.labels)
    report.attack_events = len(trace.labels)
    report.tau = pipeline.tau
    report.ceiling = pipeline.ceiling
    report.alerts = [alert_to_doc(a) for a in alerts]
    report.timelines = [timeline_to_doc(t) for t in det.timelines]
    report.recall = recall
    report.precision = precision
    report.latency_ms = latency
    # evasion: the attack never crossed the alert threshold (recorded, not asserted)
    report.evaded = len(alerts) == 0 or recall == 0.0
    report.phase_labels = {ph: sorted(ids) for ph, ids in sorted(trace.phase_events.items())}
    return report


def _execute_plan(world: World, actions, repeats: int) -> list[Event]:
    events: list[Event] = []
    for _ in range(repeats):
        for action in actions:
            events.extend(execute(world, action).events)
    return events


def _score_mean(bank: DetectorBank, events: list[Event]) -> float:
    prepared = bank.prepare(events)
    scored, _ = bank.score_stream(prepared)
    if not scored:
        return 0.0
    return float(np.mean([s.score.aggregate for s in scored]))


def _poison_arm(cfg: ScenarioConfig, base_world: World, pipeline: DefensePipeline,
                memory: EpisodicMemory, guard_on: bool, run_id: str) -> dict:
    world = base_world.copy()
    bank = DetectorBank(schemas=pipeline.bank.schemas,
                        models={s: m.copy() for s, m in pipeline.bank.models.items()})
    mem_events = list(memory.snapshot())
    schedule = poison_schedule(cfg.poison_steps, cfg.poison_exponent, world,
                               benign_s=cfg.poison_benign_s, repeats=cfg.poison_repeats)
    rollbacks = 0
    for step_idx, step in enumerate(schedule):
        window = step_benign(world, step.benign_s)
        window += _execute_plan(world, step.actions, step.repeats)
        window.sort(key=lambda e: (e.ts, e.id))
        window = [e for e in window if visible_to_defender(world, e)]
        prepared = bank.prepare(window)
        scored, _ = bank.score_stream(prepared)
        if guard_on:
            admitted = poisoning_guard(scored, pipeline.ceiling).admitted
        else:
            admitted = scored
        fresh_by_source: dict[str, list[Event]] = {}
        for s in admitted:
            fresh_by_source.setdefault(s.event.source, []).append(s.event)
        for source in sorted(fresh_by_source):
            model = bank.models.get(source)
            if model is None:
                continue
            schema = bank.schemas[source]
            fresh_x = encode_batch(fresh_by_source[source], schema, model.stats)
            mem_src = [e for e in mem_events if e.source == source]
            mem_x = encode_batch(mem_src, schema, model.stats) if mem_src else np.empty((0, model.input_width))
            result = incremental_update(
                model, fresh_x, mem_x, cfg.replay_ratio, pipeline.val_sets[source],
                steps=cfg.update_steps, seed=cfg.seed * 1_000 + step_idx,
            )
            if result.rolled_back:
                rollbacks += 1
            else:
                bank.models[source] = result.model
    # the full attack, after the schedule
    final_events = _execute_plan(world, full_attack_profile(world), 1)
    final_events = [e for e in final_events if visible_to_defender(world, e)]
    final_mean = _score_mean(bank, final_events)
    baseline_mean = _score_mean(pipeline.bank, final_events)
    arm_pipeline = replace(pipeline, bank=bank)
    window = step_benign(world, 2.0) + final_events
    window.sort(key=lambda e: (e.ts, e.id))
    det = arm_pipeline.detect(window, run_id=f"{run_id}-{'on' if guard_on else 'off'}")
    attack_ids = {e.id for e in final_events}
    alert_hits = 0
    for a in det.alerts:
        alert_hits += len(attack_ids & set(a.member_event_ids))
    return {
        "guard": "on" if guard_on else "off",
        "baseline_mean": baseline_mean,
        "final_mean": final_mean,
        "degraded": final_mean < baseline_mean,
        "alert_raised": bool(det.alerts) and alert_hits > 0,
        "alerts": len(det.alerts),
        "attack_events_in_alerts": alert_hits,
        "rollbacks": rollbacks,
    }


def _run_scenario_3(cfg: ScenarioConfig, agent: Policy, report: RunReport) -> RunReport:
    world = build_world(replace(cfg.world, seed=cfg.world.seed + cfg.seed))
    warmup = step_benign(world, cfg.warmup_s)
    pipeline = warmup_pipeline(world, warmup, cfg.pipeline)
    report.tau = pipeline.tau
    report.ceiling = pipeline.ceiling
    report.benign_events = len(warmup)
    memory = EpisodicMemory(capacity=cfg.memory_capacity, seed=cfg.seed)
    scored_warm, _ = pipeline.score(warmup)
    for s in scored_warm:
        memory.insert(s.event, s.score.aggregate, pipeline.ceiling)
    import copy as _copy

    mem_off = _copy.deepcopy(memory)
    mem_on = _copy.deepcopy(memory)
    report.poisoning = {
        "guard_off": _poison_arm(cfg, world, pipeline, mem_off, False, report.run_id),
        "guard_on": _poison_arm(cfg, world, pipeline, mem_on, True, report.run_id),
    }
    return report


def run_scenario(cfg: ScenarioConfig, agent: Policy | None = None) -> RunReport:
    """Execute one scenario end to end; deterministic given cfg and seeds."""
    started = time.monotonic()
    report = RunReport(
        run_id=f"s{cfg.scenario_id}-seed{cfg.seed}",
        scenario_id=cfg.scenario_id,
        seed=cfg.seed,
    )
    if agent is None:
        agent_world = build_world(replace(cfg.world, seed=cfg.world.seed + cfg.seed))
        agent = train_recon_agent(agent_world, cfg)
    if cfg.scenario_id == 1:
        report = _run_scenario_1(cfg, agent, report)
    elif cfg.scenario_id == 2:
        report = _run_scenario_2(cfg, agent, report)
    else:
        report = _run_scenario_3(cfg, agent, report)
    report.wall_clock_s = time.monotonic() - started
    return report
