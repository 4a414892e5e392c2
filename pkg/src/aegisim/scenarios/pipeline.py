"""Defense pipeline assembly: warmup training, calibration, detection runs.

Bundles the pieces the scenarios share: per-source behaviour models, mined
association rules, the benign rarity model, the alert threshold tau
(calibrated on benign propagated node threats) and the feedback ceiling
(benign aggregate percentile).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..correlator import (
    AlertGraph,
    RuleSet,
    Timeline,
    RarityModel,
    build_graph,
    compress,
    extract_alerts,
    fit_rarity,
    mine_rules,
    propagate,
    prune,
    threshold_from_benign,
    timeline,
)
from ..detector import DetectorBank, Hyperparams, fit_bank
from ..detector.bank import ScoredEvent
from ..events import Event, split_tag
from ..lifegen import World, sensor_schemas

DEFAULT_CEILING_PERCENTILE = 95.0


@dataclass(frozen=True)
class PipelineConfig:
    hp: Hyperparams = Hyperparams(hidden=(48, 12), max_epochs=12, patience=3,
                                  learning_rate=5e-3, batch_size=128, seed=1)
    split_seed: int = 0
    min_support: int = 30
    min_confidence: float = 0.9
    rule_dt_ms: float = 2_000.0
    window_ms: float = 2_000.0
    eps: float = 0.5
    lam: float = 0.8
    tau_percentile: float = 99.9
    rho: float = 0.8
    min_anchors: int = 3
    ceiling_percentile: float = DEFAULT_CEILING_PERCENTILE
    timeline_k: int = 16


@dataclass
class DefensePipeline:
    config: PipelineConfig
    bank: DetectorBank
    val_sets: dict[str, np.ndarray]
    rules: RuleSet
    rarity: RarityModel
    tau: float
    ceiling: float
    resolver: dict[str, str]

    def score(self, events: list[Event]) -> tuple[list[ScoredEvent], np.ndarray]:
        return self.bank.score_stream(self.bank.prepare(events))

    def detect(self, events: list[Event], *, run_id: str = "run") -> "DetectionResult":
        """Score, compress, correlate and extract pruned alerts plus timelines."""
        scored, emb = self.score(events)
        groups = compress(scored, self.rules, self.config.eps, embeddings=emb,
                          window_ms=self.config.window_ms, resolver=self.resolver)
        graph = propagate(build_graph(groups), self.rarity, self.config.lam)
        raw_alerts = extract_alerts(graph, self.tau, rho=self.config.rho,
                                    min_anchors=self.config.min_anchors, run_id=run_id)
        alerts = [prune(a, self.tau / 2.0) for a in raw_alerts]
        lines = [timeline(a, self.config.timeline_k) for a in alerts]
        return DetectionResult(scored=scored, alerts=alerts, timelines=lines,
                               n_groups=len(groups), n_nodes=len(graph.nodes))


@dataclass
class DetectionResult:
    scored: list[ScoredEvent]
    alerts: list[AlertGraph]
    timelines: list[Timeline]
    n_groups: int
    n_nodes: int


def warmup_pipeline(world: World, warmup_events: list[Event], config: PipelineConfig) -> DefensePipeline:
    """Fit detectors on the train band, mine rules, calibrate rarity/tau on
    the validation band."""
    schemas = sensor_schemas()
    bank, val_sets = fit_bank(warmup_events, schemas, config.hp, split_seed=config.split_seed)
    resolver = world.address_map()

    train_events = bank.prepare(
        [e for e in warmup_events if split_tag(e.id, config.split_seed) == "train"]
    )
    rules = mine_rules(train_events, config.min_support, config.min_confidence,
                       config.rule_dt_ms, resolver=resolver)

    val_events = bank.prepare(
        [e for e in warmup_events if split_tag(e.id, config.split_seed) == "validation"]
    )
    scored_val, emb_val = bank.score_stream(val_events)
    benign_groups = compress(scored_val, rules, config.eps, embeddings=emb_val,
                             window_ms=config.window_ms, resolver=resolver)
    benign_graph = build_graph(benign_groups)
    rarity = fit_rarity(benign_graph)
    propagate(benign_graph, rarity, config.lam)
    tau = threshold_from_benign(
        (n.threat for n in benign_graph.nodes.values()), config.tau_percentile
    )
    aggregates = np.array([s.score.aggregate for s in scored_val])
    ceiling = float(np.percentile(aggregates, config.ceiling_percentile))
    return DefensePipeline(config=config, bank=bank, val_sets=val_sets, rules=rules,
                           rarity=rarity, tau=tau, ceiling=ceiling, resolver=resolver)
