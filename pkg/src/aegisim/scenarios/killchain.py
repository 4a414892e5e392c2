"""The seven-phase scripted kill-chain attack.

Phases 1a (external scan) and 6b (internal scan) are agent-driven; the rest
is scripted. Benign life traffic keeps flowing between phases, so the attack
is needle-in-haystack, not a clean-room trace. Every attack event carries
its phase label in the returned ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..events import Event
from ..lifegen import (
    ATTACKER_ADDRESS,
    CNC_ADDRESS,
    Action,
    World,
    WorldError,
    execute,
    step_benign,
    visible_to_defender,
)
from ..lifegen.actions import LOCAL_RAT_PATH, PAYLOAD_PATH
from ..redteam import Policy, ReconEnv, RewardConfig, act, recon_dictionary

PHASE_ORDER = ("1a", "1b", "2", "3", "4", "5", "6a", "6b", "7a", "7b", "7c")


@dataclass
class KillChainTrace:
    events: list[Event] = field(default_factory=list)  # full window, time-ordered
    labels: dict[str, str] = field(default_factory=dict)  # attack event id -> phase
    phase_events: dict[str, list[str]] = field(default_factory=dict)
    attack_start_ts: int | None = None

    def attack_ids(self, world: World | None = None) -> set:
        return set(self.labels)


def _agent_scan(world: World, policy: Policy | None, actor: str, n_actions: int,
                seed: int) -> list:
    env = ReconEnv(world, recon_dictionary(), RewardConfig(), actor=actor,
                   episode_len=n_actions)
    rng = np.random.default_rng(seed)
    events = []
    s = env.reset()
    done = False
    while not done:
        mask = env.valid_mask()
        if policy is None:
            a = int(rng.choice(np.flatnonzero(mask)))
        else:
            a = act(policy, s, 0.0, mask, rng)
        s, _, done, step_events = env.step(a)
        events.extend(step_events)
    return events


def killchain_attack(
    world: World,
    agent: Policy | None,
    *,
    recon_actions: int = 40,
    benign_gap_s: float = 2.0,
    seed: int = 0,
) -> KillChainTrace:
    """Execute the scripted attack, interleaved with life traffic."""
    web = world.hosts[world.web_server]
    if not web.vulnerable:
        raise WorldError("theatre lacks the exploitable version-check endpoint")
    filesrv = world.hosts[world.file_server]
    pc = sorted(h.id for h in world.zone_hosts(3))[0]
    trace = KillChainTrace()

    def benign(duration: float) -> None:
        trace.events.extend(step_benign(world, duration))

    def record(phase: str, events: list[Event]) -> None:
        trace.phase_events.setdefault(phase, [])
        for e in events:
            trace.events.append(e)
            trace.labels[e.id] = phase
            trace.phase_events[phase].append(e.id)
            if trace.attack_start_ts is None:
                trace.attack_start_ts = e.ts

    def run(phase: str, action: Action) -> None:
        record(phase, execute(world, action).events)

    benign(benign_gap_s)
    record("1a", _agent_scan(world, agent, ATTACKER_ADDRESS, recon_actions, seed))
    benign(benign_gap_s)
    run("1b", Action("http_get", ATTACKER_ADDRESS, {"host": web.id, "path": "/"}))
    run("1b", Action("http_get", ATTACKER_ADDRESS, {"host": web.id, "path": "/version-check"}))
    trace.phase_events.setdefault("2", [])  # RAT built off-theatre: no events
    benign(benign_gap_s)
    run("3", Action("upload_payload", ATTACKER_ADDRESS, {"host": web.id, "path": PAYLOAD_PATH}))
    run("4", Action("deface", ATTACKER_ADDRESS, {"host": web.id}))
    benign(benign_gap_s)
    run("5", Action("download", f"{pc}/chrome", {"host": web.id, "path": PAYLOAD_PATH}))
    run("5", Action("run_payload", pc, {"path": LOCAL_RAT_PATH}))
    benign(benign_gap_s)
    run("6a", Action("download", f"{pc}/rat", {"host": CNC_ADDRESS, "path": "/tools/scankit.tgz"}))
    record("6b", _agent_scan(world, agent, f"{pc}/rat", recon_actions, seed + 1))
    benign(benign_gap_s)
    for share in world.shares.get(filesrv.id, []):
        if share.sensitive:
            run("7a", Action("read_file", f"{pc}/rat", {"host": filesrv.id, "path": share.path}))
    for share in world.shares.get(filesrv.id, []):
        if share.sensitive:
            run("7b", Action("exfiltrate", f"{pc}/rat",
                             {"host": filesrv.id, "path": share.path, "destination": CNC_ADDRESS}))
    run("7c", Action("delete_logs", f"{pc}/rat", {"host": pc}))
    run("7c", Action("delete_logs", f"{web.id}/bash", {"host": web.id}))
    benign(benign_gap_s)

    trace.events.sort(key=lambda e: (e.ts, e.id))
    visible = {e.id for e in trace.events if visible_to_defender(world, e)}
    trace.labels = {eid: ph for eid, ph in trace.labels.items() if eid in visible}
    trace.phase_events = {
        ph: [eid for eid in ids if eid in visible] for ph, ids in trace.phase_events.items()
    }
    return trace
