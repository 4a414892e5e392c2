"""Checkpoint (de)serialization for models, policies, bases and memory.

Round-trips are behaviour-exact: weights and tables go through JSON float
repr, which is lossless for doubles.
"""

from __future__ import annotations

import random
from pathlib import Path

import numpy as np

from ..detector import BehaviourModel, Hyperparams, Network, TrainLog, field_specs
from ..detector.bank import DetectorBank
from ..events import EncoderState, Hint, Schema, parse_event, serialize_event
from ..feedback import BaseEntry, EpisodicMemory, FeedbackStores, GraphSignature, SignatureBase
from ..redteam import MLP, Policy
from .store import load_checkpoint, save_checkpoint


def _schema_payload(s: Schema) -> dict:
    return {
        "fields": dict(s.fields),
        "hints": [{"field": h.field, "pattern": h.pattern, "replacement": h.replacement} for h in s.hints],
        "noisy_applications": sorted(s.noisy_applications),
        "vocabularies": {k: list(v) for k, v in s.vocabularies.items()},
    }


def _schema_from(payload: dict) -> Schema:
    return Schema(
        fields=dict(payload["fields"]),
        hints=tuple(Hint(**h) for h in payload["hints"]),
        noisy_applications=frozenset(payload["noisy_applications"]),
        vocabularies={k: tuple(v) for k, v in payload["vocabularies"].items()},
    )


def _stats_payload(st: EncoderState) -> dict:
    return {
        "schema": _schema_payload(st.schema),
        "means": dict(st.means),
        "stds": dict(st.stds),
        "vocabs": {k: list(v) for k, v in st.vocabs.items()},
        "segments": {k: [sl.start, sl.stop] for k, sl in st.segments.items()},
        "width": st.width,
    }


def _stats_from(payload: dict) -> EncoderState:
    return EncoderState(
        schema=_schema_from(payload["schema"]),
        means=dict(payload["means"]),
        stds=dict(payload["stds"]),
        vocabs={k: tuple(v) for k, v in payload["vocabs"].items()},
        segments={k: slice(a, b) for k, (a, b) in payload["segments"].items()},
        width=int(payload["width"]),
    )


def model_payload(m: BehaviourModel) -> dict:
    return {
        "widths": list(m.net.widths),
        "weights": [w.tolist() for w in m.net.weights],
        "biases": [b.tolist() for b in m.net.biases],
        "stats": _stats_payload(m.stats),
        "quantile_tables": {k: v.tolist() for k, v in m.quantile_tables.items()},
        "aggregate_table": m.aggregate_table.tolist(),
        "hp": {
            "hidden": list(m.hp.hidden),
            "learning_rate": m.hp.learning_rate,
            "batch_size": m.hp.batch_size,
            "max_epochs": m.hp.max_epochs,
            "patience": m.hp.patience,
            "l2": m.hp.l2,
            "seed": m.hp.seed,
        },
        "log": {
            "stopped_epoch": m.log.stopped_epoch,
            "best_epoch": m.log.best_epoch,
            "best_val_loss": m.log.best_val_loss,
        },
    }


def model_from_payload(payload: dict) -> BehaviourModel:
    stats = _stats_from(payload["stats"])
    hp = Hyperparams(
        hidden=tuple(payload["hp"]["hidden"]),
        learning_rate=payload["hp"]["learning_rate"],
        batch_size=payload["hp"]["batch_size"],
        max_epochs=payload["hp"]["max_epochs"],
        patience=payload["hp"]["patience"],
        l2=payload["hp"]["l2"],
        seed=payload["hp"]["seed"],
    )
    specs = field_specs(stats)
    net = Network.__new__(Network)
    net.widths = list(payload["widths"])
    net.specs = specs
    net.weights = [np.array(w, dtype=np.float64) for w in payload["weights"]]
    net.biases = [np.array(b, dtype=np.float64) for b in payload["biases"]]
    log = TrainLog(
        stopped_epoch=payload["log"]["stopped_epoch"],
        best_epoch=payload["log"]["best_epoch"],
        best_val_loss=payload["log"]["best_val_loss"],
    )
    return BehaviourModel(
        net=net,
        stats=stats,
        specs=specs,
        quantile_tables={k: np.array(v, dtype=np.float64) for k, v in payload["quantile_tables"].items()},
        aggregate_table=np.array(payload["aggregate_table"], dtype=np.float64),
        hp=hp,
        log=log,
    )


def save_bank(path: Path, bank: DetectorBank) -> None:
    payload = {
        "schemas": {k: _schema_payload(v) for k, v in bank.schemas.items()},
        "models": {k: model_payload(m) for k, m in bank.models.items()},
    }
    save_checkpoint(path, "detector-bank", payload)


def load_bank(path: Path) -> DetectorBank:
    payload = load_checkpoint(path, "detector-bank")
    return DetectorBank(
        schemas={k: _schema_from(v) for k, v in payload["schemas"].items()},
        models={k: model_from_payload(v) for k, v in payload["models"].items()},
    )


def _mlp_payload(m: MLP) -> dict:
    return {"w1": m.w1.tolist(), "b1": m.b1.tolist(), "w2": m.w2.tolist(), "b2": m.b2.tolist()}


def _mlp_from(payload: dict) -> MLP:
    m = MLP.__new__(MLP)
    m.w1 = np.array(payload["w1"], dtype=np.float64)
    m.b1 = np.array(payload["b1"], dtype=np.float64)
    m.w2 = np.array(payload["w2"], dtype=np.float64)
    m.b2 = np.array(payload["b2"], dtype=np.float64)
    return m


def save_policy(path: Path, p: Policy) -> None:
    save_checkpoint(path, "policy", {
        "actor": _mlp_payload(p.actor),
        "critic": _mlp_payload(p.critic),
        "n_actions": p.n_actions,
        "episodes_trained": p.episodes_trained,
        "seed": p.seed,
        "meta": p.meta,
    })


def load_policy(path: Path) -> Policy:
    payload = load_checkpoint(path, "policy")
    return Policy(
        actor=_mlp_from(payload["actor"]),
        critic=_mlp_from(payload["critic"]),
        n_actions=int(payload["n_actions"]),
        episodes_trained=int(payload["episodes_trained"]),
        seed=int(payload["seed"]),
        meta=dict(payload.get("meta", {})),
    )


def signature_payload(sig: GraphSignature) -> dict:
    return {
        "triples": [[list(t), c] for t, c in sig.triples],
        "fields": sorted(sig.fields),
        "node_bucket": sig.node_bucket,
    }


def signature_from(payload: dict) -> GraphSignature:
    return GraphSignature(
        triples=tuple((tuple(t), int(c)) for t, c in payload["triples"]),
        fields=frozenset(payload["fields"]),
        node_bucket=int(payload["node_bucket"]),
    )


def stores_payload(stores: FeedbackStores) -> dict:
    def base(b: SignatureBase) -> list:
        return [
            {
                "alert_id": e.alert_id,
                "sig": signature_payload(e.sig),
                "verdict_ts": e.verdict_ts,
                "note": e.note,
                "member_ids": list(e.member_ids),
            }
            for e in b.entries
        ]

    return {
        "fp": base(stores.fp_base),
        "authorized": base(stores.authorized_base),
        "soc_queue": list(stores.soc_queue),
        "annotated": dict(stores.annotated),
    }


def stores_from_payload(payload: dict) -> FeedbackStores:
    def entries(items: list) -> list:
        return [
            BaseEntry(
                alert_id=e["alert_id"],
                sig=signature_from(e["sig"]),
                verdict_ts=int(e["verdict_ts"]),
                note=e["note"],
                member_ids=tuple(e["member_ids"]),
            )
            for e in items
        ]

    stores = FeedbackStores()
    stores.fp_base.entries.extend(entries(payload["fp"]))
    stores.authorized_base.entries.extend(entries(payload["authorized"]))
    stores.soc_queue.extend(payload["soc_queue"])
    stores.annotated.update(payload["annotated"])
    return stores


def save_memory(path: Path, mem: EpisodicMemory) -> None:
    state = mem._rng.getstate()
    save_checkpoint(path, "episodic-memory", {
        "capacity": mem.capacity,
        "seed": mem.seed,
        "admitted": mem.admitted,
        "rejected": mem.rejected,
        "events": [serialize_event(e) for e in mem.events],
        "rng_state": [state[0], list(state[1]), state[2]],
    })


def load_memory(path: Path) -> EpisodicMemory:
    payload = load_checkpoint(path, "episodic-memory")
    mem = EpisodicMemory(capacity=int(payload["capacity"]), seed=int(payload["seed"]))
    mem.admitted = int(payload["admitted"])
    mem.rejected = int(payload["rejected"])
    mem.events = [parse_event(line) for line in payload["events"]]
    version, internal, gauss = payload["rng_state"]
    mem._rng = random.Random()
    mem._rng.setstate((version, tuple(internal), gauss))
    return mem
