"""Per-source event schemas for the simulated sensors."""

from __future__ import annotations

from ..events import Hint, Schema

TMP_HINT = Hint(field="resource", pattern=r"/tmp/tmp[0-9A-Za-z]+", replacement="/tmp/<TMP>")

NOISY_APPS = frozenset({"telemetry"})


def sensor_schemas() -> dict[str, Schema]:
    """One schema per event source (os / network / application)."""
    return {
        "os": Schema(
            fields={
                "action": "categorical",
                "actor": "categorical",
                "location": "categorical",
                "resource": "categorical",
                "ts": "timestamp",
                "bytes": "numeric",
                "duration_ms": "numeric",
                "cpu": "numeric",
                "result": "categorical",
                "priority": "categorical",
            },
            hints=(TMP_HINT,),
            noisy_applications=NOISY_APPS,
        ),
        "network": Schema(
            fields={
                "action": "categorical",
                "actor": "categorical",
                "location": "categorical",
                "resource": "categorical",
                "ts": "timestamp",
                "port": "categorical",
                "proto": "categorical",
                "bytes_out": "numeric",
                "bytes_in": "numeric",
                "duration_ms": "numeric",
                "result": "categorical",
            },
            noisy_applications=NOISY_APPS,
        ),
        "application": Schema(
            fields={
                "action": "categorical",
                "actor": "categorical",
                "location": "categorical",
                "resource": "categorical",
                "ts": "timestamp",
                "status": "categorical",
                "method": "categorical",
                "latency_ms": "numeric",
                "size_bytes": "numeric",
                "session_len": "numeric",
            },
            noisy_applications=NOISY_APPS,
        ),
    }
