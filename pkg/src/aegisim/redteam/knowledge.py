"""Outcome parsing into findings, knowledge merging, evaluation metrics.

Each command has a frozen response format; the parser dispatches on shape.
Findings are raw observations; merging them into AgentKnowledge deduplicates
and reports which inventory items are genuinely new.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..lifegen import Action, ActionOutcome, WorldTruth

_ALIVE = re.compile(r"^(\d+\.\d+\.\d+\.\d+) alive$")
_PROBE = re.compile(r"^(\d+\.\d+\.\d+\.\d+) (\d+)/(open|closed|filtered)(?: (\S+))?$")
_BANNER = re.compile(r"^(\d+\.\d+\.\d+\.\d+):(\d+) (\S+) (\S+)$")
_NO_BANNER = re.compile(r"^(\d+\.\d+\.\d+\.\d+):(\d+) no banner$")
_SHARE = re.compile(r"^share (\S+) (\d+)$")
_HTTP = re.compile(r"^HTTP (-?\d+) (.*)$", re.S)
_READ = re.compile(r"^read (\S+) \((\d+) bytes\)$")
_SENT = re.compile(r"^sent (\S+) \((\d+) bytes\) to (\S+)$")
_VULN = re.compile(r"interpreter (\S+)/(\S+)")


@dataclass(frozen=True)
class Finding:
    kind: str  # host | port_state | service | share | vuln | page | file | exfil
    host: str | None = None
    port: int | None = None
    value: str = ""
    size: int = 0


def parse_outcome(o: ActionOutcome) -> list[Finding]:
    """Template-specific extraction; unrecognized formats yield no findings."""
    findings: list[Finding] = []
    for line in o.response.splitlines():
        line = line.strip()
        if not line:
            continue
        m = _ALIVE.match(line)
        if m:
            findings.append(Finding("host", host=m.group(1)))
            continue
        m = _PROBE.match(line)
        if m:
            findings.append(
                Finding("port_state", host=m.group(1), port=int(m.group(2)),
                        value=m.group(3) + (f" {m.group(4)}" if m.group(4) else ""))
            )
            continue
        m = _NO_BANNER.match(line)
        if m:
            continue
        m = _BANNER.match(line)
        if m:
            findings.append(
                Finding("service", host=m.group(1), port=int(m.group(2)),
                        value=f"{m.group(3)}/{m.group(4)}")
            )
            continue
        m = _SHARE.match(line)
        if m:
            findings.append(Finding("share", value=m.group(1), size=int(m.group(2))))
            continue
        m = _READ.match(line)
        if m:
            findings.append(Finding("file", value=m.group(1), size=int(m.group(2))))
            continue
        m = _SENT.match(line)
        if m:
            findings.append(Finding("exfil", value=m.group(3), size=int(m.group(2))))
            continue
        m = _HTTP.match(line)
        if m:
            status, body = int(m.group(1)), m.group(2)
            if status == 200:
                vm = _VULN.search(body)
                if vm:
                    findings.append(Finding("vuln", value=f"{vm.group(1)}/{vm.group(2)}"))
                else:
                    findings.append(Finding("page", value=body[:64]))
            break
    return findings


def merge_findings(k, action: Action, findings: list[Finding]) -> list[str]:
    """Fold findings into knowledge; returns newly established inventory keys."""
    new_keys: list[str] = []
    target = str(action.params.get("host", ""))
    for f in findings:
        if f.kind == "host" and f.host:
            h = k.host(f.host)
            if not h.alive:
                h.alive = True
                new_keys.append(f"host:{f.host}")
        elif f.kind == "port_state" and f.host is not None and f.port is not None:
            h = k.host(f.host)
            state = f.value.split()[0]
            if h.ports.get(f.port) != state:
                h.ports[f.port] = state
                if state == "open":
                    if not h.alive:
                        h.alive = True
                        new_keys.append(f"host:{f.host}")
                    new_keys.append(f"port:{f.host}:{f.port}")
        elif f.kind == "service" and f.host is not None and f.port is not None:
            h = k.host(f.host)
            if h.services.get(f.port) != f.value:
                h.services[f.port] = f.value
                new_keys.append(f"service:{f.host}:{f.port}:{f.value}")
        elif f.kind == "share" and target:
            h = k.host(target)
            if f.value not in h.shares:
                h.shares.append(f.value)
                new_keys.append(f"share:{target}:{f.value}")
        elif f.kind == "vuln" and target:
            h = k.host(target)
            if h.vuln != f.value:
                h.vuln = f.value
                new_keys.append(f"vuln:{target}:{f.value}")
        elif f.kind == "page" and target:
            k.host(target).fetched_paths.add(str(action.params.get("path", "/")))
        elif f.kind == "file" and target:
            k.host(target).read_paths.add(f.value)
    if action.command == "http_get" and target:
        k.host(target).fetched_paths.add(str(action.params.get("path", "/")))
    return new_keys


def coverage(k, t: WorldTruth) -> float:
    """Discovered fraction of the true attack surface."""
    truth_keys = t.keys()
    if not truth_keys:
        return 0.0
    return len(k.truth_keys() & truth_keys) / len(truth_keys)


@dataclass(frozen=True)
class EpisodeTrace:
    actions: tuple[str, ...]
    new_keys_per_step: tuple[int, ...]
    rewards: tuple[float, ...]

    @property
    def score(self) -> float:
        return float(sum(self.rewards))


def efficiency(trace: EpisodeTrace) -> float:
    """Distinct new findings per action over one episode."""
    if not trace.actions:
        raise ValueError("empty trace")
    return sum(trace.new_keys_per_step) / len(trace.actions)
