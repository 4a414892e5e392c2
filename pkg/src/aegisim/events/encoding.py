"""Numeric encoding of events for the behaviour models.

Numeric fields are z-scored against training statistics, categorical fields
are one-hot with a capped vocabulary plus an out-of-vocabulary slot, and
timestamps expand to cyclical hour-of-day / day-of-week features.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .model import OOV, Event, EventError, Schema

MS_PER_DAY = 86_400_000
MS_PER_WEEK = 7 * MS_PER_DAY

DEFAULT_VOCAB_CAP = 64

# A single wild metric must not saturate the whole encoding; anything this
# many deviations out is equally damning for scoring purposes.
Z_CLIP = 8.0


def squash(x: float) -> float:
    """Signed log1p; security metrics (bytes, latencies) are heavy-tailed."""
    return math.copysign(math.log1p(abs(x)), x)


@dataclass(frozen=True)
class FeatureVector:
    """Dense encoding of one event plus the field -> slice segment index."""

    values: np.ndarray
    segments: dict[str, slice]

    def segment(self, name: str) -> np.ndarray:
        return self.values[self.segments[name]]


@dataclass(frozen=True)
class EncoderState:
    """Immutable per-field statistics fitted on training data."""

    schema: Schema
    means: dict[str, float]
    stds: dict[str, float]
    vocabs: dict[str, tuple[str, ...]]
    segments: dict[str, slice]
    width: int

    def vocab_index(self, name: str) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vocabs[name])}


def _segment_width(kind: str, vocab) -> int:
    if kind == "numeric":
        return 1
    if kind == "timestamp":
        return 4
    return len(vocab)


def fit_encoder(events: list[Event], schema: Schema, vocab_cap: int = DEFAULT_VOCAB_CAP) -> EncoderState:
    """Fit normalization stats and vocabularies on a training corpus.

    Categorical vocabularies keep the ``vocab_cap`` most frequent values
    (ties broken by value) plus the OOV slot. Identifier fields are skipped.
    """
    if not events:
        raise EventError("cannot fit encoder on empty corpus")
    means: dict[str, float] = {}
    stds: dict[str, float] = {}
    vocabs: dict[str, tuple[str, ...]] = {}
    for name, kind in schema.fields.items():
        if kind == "numeric":
            col = np.array([squash(float(schema.value_of(e, name))) for e in events], dtype=np.float64)
            means[name] = float(col.mean())
            std = float(col.std())
            # constant columns (std is fp noise) z-score to exactly 0
            stds[name] = std if std > 1e-12 else 1.0
        elif kind == "categorical":
            if name in schema.vocabularies:
                vocab = schema.vocabularies[name]
            else:
                counts = Counter(str(schema.value_of(e, name)) for e in events)
                top = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:vocab_cap]
                vocab = tuple(v for v, _ in top) + (OOV,)
            vocabs[name] = vocab
    segments: dict[str, slice] = {}
    offset = 0
    for name, kind in schema.fields.items():
        if kind == "identifier":
            continue
        width = _segment_width(kind, vocabs.get(name, ()))
        segments[name] = slice(offset, offset + width)
        offset += width
    return EncoderState(schema=schema, means=means, stds=stds, vocabs=vocabs, segments=segments, width=offset)


def encode(e: Event, schema: Schema, stats: EncoderState) -> FeatureVector:
    """Encode one schema-valid event. Total on valid events, always finite."""
    schema.validate(e)
    if stats.schema.fields != schema.fields:
        raise EventError("encoder state was fitted for a different schema")
    values = np.zeros(stats.width, dtype=np.float64)
    for name, kind in schema.fields.items():
        if kind == "identifier":
            continue
        seg = stats.segments[name]
        raw = schema.value_of(e, name)
        if kind == "numeric":
            if not isinstance(raw, (int, float)) or isinstance(raw, bool):
                raise EventError(f"field {name!r}: expected numeric, got {type(raw).__name__}")
            z = (squash(float(raw)) - stats.means[name]) / stats.stds[name]
            values[seg.start] = min(max(z, -Z_CLIP), Z_CLIP)
        elif kind == "timestamp":
            day_phase = 2.0 * math.pi * ((raw % MS_PER_DAY) / MS_PER_DAY)
            week_phase = 2.0 * math.pi * ((raw % MS_PER_WEEK) / MS_PER_WEEK)
            values[seg.start : seg.stop] = (
                math.sin(day_phase),
                math.cos(day_phase),
                math.sin(week_phase),
                math.cos(week_phase),
            )
        else:
            if not isinstance(raw, str):
                raise EventError(f"field {name!r}: expected categorical, got {type(raw).__name__}")
            index = stats.vocab_index(name)
            values[seg.start + index.get(raw, index[OOV])] = 1.0
    if not np.isfinite(values).all():
        raise EventError(f"event {e.id}: non-finite encoding")
    return FeatureVector(values=values, segments=stats.segments)


def encode_batch(events: list[Event], schema: Schema, stats: EncoderState) -> np.ndarray:
    """Encode many events into a (n, width) matrix (row i is event i)."""
    out = np.zeros((len(events), stats.width), dtype=np.float64)
    for i, e in enumerate(events):
        out[i] = encode(e, schema, stats).values
    return out
