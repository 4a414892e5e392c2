"""One behaviour model per event source, behind a single scoring facade.

Metric schemas differ per source, so os / network / application each get
their own encoder and autoencoder (switchable to a shared model by passing
a single-entry schema map).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..events import Event, Schema, canonicalize, encode_batch, fit_encoder, split_tag
from .autoencoder import Hyperparams
from .scoring import BehaviourModel, IncongruityScore, embeddings, fit, score_matrix


@dataclass
class ScoredEvent:
    event: Event
    score: IncongruityScore

    @property
    def aggregate(self) -> float:
        return self.score.aggregate


@dataclass
class DetectorBank:
    schemas: dict[str, Schema]
    models: dict[str, BehaviourModel]

    def model_for(self, source: str) -> BehaviourModel:
        if source not in self.models:
            raise KeyError(f"no behaviour model for source {source!r}")
        return self.models[source]

    def prepare(self, events: list[Event]) -> list[Event]:
        """Canonicalize and drop noisy-application events."""
        out = []
        for e in events:
            schema = self.schemas.get(e.source)
            if schema is None:
                continue
            c = canonicalize(e, schema)
            if not c.droppable:
                out.append(c)
        return out

    def score_stream(self, events: list[Event]) -> tuple[list[ScoredEvent], np.ndarray]:
        """Score canonicalized events, returning bottleneck embeddings too.

        Embeddings from the per-source models are padded to a common width so
        the correlator can treat them as one matrix aligned with the stream.
        """
        by_source: dict[str, list[int]] = {}
        for i, e in enumerate(events):
            by_source.setdefault(e.source, []).append(i)
        scored: list[ScoredEvent | None] = [None] * len(events)
        width = max((m.hp.hidden[-1] for m in self.models.values()), default=0)
        emb = np.zeros((len(events), width))
        for source, idxs in by_source.items():
            model = self.model_for(source)
            schema = self.schemas[source]
            x = encode_batch([events[i] for i in idxs], schema, model.stats)
            aggs, per_field, attributed = score_matrix(model, x)
            z = embeddings(model, x)
            emb[idxs, : z.shape[1]] = z
            names = [spec.name for spec in model.specs]
            for row, i in enumerate(idxs):
                fields = {name: float(per_field[row, j]) for j, name in enumerate(names)}
                scored[i] = ScoredEvent(
                    events[i],
                    IncongruityScore(float(aggs[row]), fields, attributed=names[int(attributed[row])]),
                )
        return [s for s in scored if s is not None], emb


def fit_bank(
    events: list[Event],
    schemas: dict[str, Schema],
    hp: Hyperparams,
    *,
    split_seed: int = 0,
) -> tuple[DetectorBank, dict[str, np.ndarray]]:
    """Fit per-source models on the train band, calibrating on validation.

    Returns the bank plus the per-source validation matrices (reused by the
    incremental-update guard and the feedback layer's ceiling).
    """
    bank = DetectorBank(schemas=schemas, models={})
    prepared: dict[str, dict[str, list[Event]]] = {}
    for e in events:
        schema = schemas.get(e.source)
        if schema is None:
            continue
        c = canonicalize(e, schema)
        if c.droppable:
            continue
        tag = split_tag(c.id, split_seed)
        prepared.setdefault(e.source, {}).setdefault(tag, []).append(c)
    val_sets: dict[str, np.ndarray] = {}
    for source, bands in sorted(prepared.items()):
        train_events = bands.get("train", [])
        val_events = bands.get("validation", [])
        if not train_events or not val_events:
            raise ValueError(f"source {source!r}: empty train or validation band")
        schema = schemas[source]
        stats = fit_encoder(train_events, schema)
        train_x = encode_batch(train_events, schema, stats)
        val_x = encode_batch(val_events, schema, stats)
        model = fit(train_x, val_x, stats, replace(hp, seed=hp.seed + _source_offset(source)))
        bank.models[source] = model
        val_sets[source] = val_x
    return bank, val_sets


def _source_offset(source: str) -> int:
    return {"os": 0, "network": 1, "application": 2}.get(source, 9)
