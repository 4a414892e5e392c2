"""Event data model, wire format and schema-driven canonicalization.

The wire format is line-delimited JSON, one event per line, with the key
order fixed to (id, ts, actor, action, location, resource, source, metrics)
so that parse -> serialize is the identity on canonical records.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace

SOURCES = ("os", "network", "application")

MANDATORY_FIELDS = ("id", "ts", "actor", "action", "source")

CANONICAL_KEYS = ("id", "ts", "actor", "action", "location", "resource", "source", "metrics")

OOV = "<OOV>"


class EventError(ValueError):
    """Malformed or schema-violating event record."""


@dataclass(slots=True)
class Event:
    """One observed security event.

    ``droppable`` is bookkeeping set by :func:`canonicalize` for events from
    noisy applications; it is never serialized.
    """

    id: str
    ts: int
    actor: str
    action: str
    location: str = ""
    resource: str | None = None
    source: str = "os"
    metrics: dict = field(default_factory=dict)
    droppable: bool = False

    def __post_init__(self):
        if self.source not in SOURCES:
            raise EventError(f"unknown source {self.source!r}")
        if self.ts < 0:
            raise EventError("negative timestamp")


def parse_event(line: str) -> Event:
    """Parse one wire-format record.

    Unknown top-level keys are preserved into ``metrics``. Raises
    :class:`EventError` on malformed input or a missing mandatory field.
    """
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise EventError(f"malformed record: {exc}") from exc
    if not isinstance(raw, dict):
        raise EventError("record is not an object")
    for key in MANDATORY_FIELDS:
        if key not in raw:
            raise EventError(f"missing mandatory field {key!r}")
    metrics = dict(raw.get("metrics") or {})
    for key, value in raw.items():
        if key not in CANONICAL_KEYS:
            metrics[key] = value
    ts = raw["ts"]
    if not isinstance(ts, int) or isinstance(ts, bool):
        raise EventError("ts must be an integer millisecond timestamp")
    return Event(
        id=str(raw["id"]),
        ts=ts,
        actor=str(raw["actor"]),
        action=str(raw["action"]),
        location=str(raw.get("location", "")),
        resource=None if raw.get("resource") is None else str(raw["resource"]),
        source=str(raw["source"]),
        metrics=metrics,
    )


def serialize_event(e: Event) -> str:
    """Canonical single-line form of an event (inverse of parse_event)."""
    obj = {
        "id": e.id,
        "ts": e.ts,
        "actor": e.actor,
        "action": e.action,
        "location": e.location,
        "resource": e.resource,
        "source": e.source,
        "metrics": e.metrics,
    }
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def read_events(path) -> list[Event]:
    with open(path, encoding="utf-8") as fh:
        return [parse_event(line) for line in fh if line.strip()]


def write_events(path, events) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in events:
            fh.write(serialize_event(e) + "\n")


@dataclass(frozen=True)
class Hint:
    """Canonicalization rule: rewrite matches of ``pattern`` in ``field``."""

    field: str
    pattern: str
    replacement: str


@dataclass(frozen=True)
class Schema:
    """Field kinds plus preprocessing hints for one event source.

    ``fields`` maps a field name to a kind in {numeric, categorical,
    identifier, timestamp}. Names resolve against the event's top-level
    attributes first, then against ``metrics``. Identifier fields are
    validated but carry no encoded features.
    """

    fields: dict[str, str]
    hints: tuple[Hint, ...] = ()
    noisy_applications: frozenset = frozenset()
    vocabularies: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        kinds = {"numeric", "categorical", "identifier", "timestamp"}
        for name, kind in self.fields.items():
            if kind not in kinds:
                raise EventError(f"field {name!r} has unknown kind {kind!r}")
        for hint in self.hints:
            if hint.field not in self.fields and hint.field not in CANONICAL_KEYS:
                raise EventError(f"hint references unknown field {hint.field!r}")
        for name, vocab in self.vocabularies.items():
            if not vocab or OOV not in vocab:
                raise EventError(f"vocabulary for {name!r} must be non-empty and contain {OOV}")

    def value_of(self, e: Event, name: str):
        if name in ("actor", "action", "location", "resource", "source", "id"):
            return getattr(e, name)
        if name == "ts":
            return e.ts
        return e.metrics.get(name)

    def validate(self, e: Event) -> None:
        """Reject events whose typed fields are absent or of the wrong kind."""
        for name, kind in self.fields.items():
            value = self.value_of(e, name)
            if value is None:
                raise EventError(f"event {e.id}: missing field {name!r}")
            if kind == "numeric" and not isinstance(value, (int, float)):
                raise EventError(f"event {e.id}: field {name!r} is not numeric")
            if kind in ("categorical", "identifier") and not isinstance(value, str):
                raise EventError(f"event {e.id}: field {name!r} is not a string")


def canonicalize(e: Event, schema: Schema) -> Event:
    """Apply the schema's preprocessing hints.

    Hint patterns collapse noisy name fragments (e.g. temp-file suffixes);
    events from noisy applications are flagged droppable. No-match is a
    no-op and the input event is never mutated.
    """
    updates: dict = {}
    for hint in schema.hints:
        current = updates.get(hint.field, schema.value_of(e, hint.field))
        if not isinstance(current, str):
            continue
        rewritten = re.sub(hint.pattern, hint.replacement, current)
        if rewritten != current:
            updates[hint.field] = rewritten
    droppable = e.location in schema.noisy_applications or e.metrics.get("app") in schema.noisy_applications
    attr_updates = {k: v for k, v in updates.items() if k in ("actor", "action", "location", "resource")}
    metric_updates = {k: v for k, v in updates.items() if k not in attr_updates}
    out = replace(e, **attr_updates) if attr_updates else replace(e)
    if metric_updates:
        out.metrics = {**e.metrics, **metric_updates}
    out.droppable = droppable
    return out
