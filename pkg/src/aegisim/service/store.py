"""Durable storage: append-only JSONL stores and checksummed checkpoints.

Every mutation is flushed and fsynced before the caller is acknowledged;
state rebuilds by replaying the log, so a kill at any point loses nothing
that was acknowledged.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

CHECKPOINT_SCHEMA_VERSION = 1


class StoreError(RuntimeError):
    pass


class JsonlStore:
    """Append-only line store; one JSON object per line."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, record: dict) -> None:
        line = json.dumps(record, separators=(",", ":"), sort_keys=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def load(self) -> list[dict]:
        if not self.path.exists():
            return []
        out = []
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    out.append(json.loads(line))
        return out

    def compact(self, records: list[dict]) -> None:
        tmp = self.path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            for r in records:
                fh.write(json.dumps(r, separators=(",", ":"), sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self.path)


def save_checkpoint(path: Path, kind: str, payload: dict) -> None:
    """Versioned, checksummed document. The payload must be JSON-clean."""
    body = json.dumps(payload, separators=(",", ":"), sort_keys=True)
    doc = {
        "schema_version": CHECKPOINT_SCHEMA_VERSION,
        "kind": kind,
        "sha256": hashlib.sha256(body.encode()).hexdigest(),
        "payload": payload,
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, separators=(",", ":"), sort_keys=True)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def load_checkpoint(path: Path, kind: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise StoreError(f"unreadable checkpoint {path}: {exc}") from exc
    if doc.get("schema_version") != CHECKPOINT_SCHEMA_VERSION:
        raise StoreError(
            f"checkpoint schema version {doc.get('schema_version')} != {CHECKPOINT_SCHEMA_VERSION}"
        )
    if doc.get("kind") != kind:
        raise StoreError(f"checkpoint kind {doc.get('kind')!r}, expected {kind!r}")
    body = json.dumps(doc.get("payload"), separators=(",", ":"), sort_keys=True)
    if hashlib.sha256(body.encode()).hexdigest() != doc.get("sha256"):
        raise StoreError(f"checksum mismatch in {path}")
    return doc["payload"]
