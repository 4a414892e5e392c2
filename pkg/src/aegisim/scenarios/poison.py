"""Frog-boiling poisoning schedule.

A sequence of daily action plans interpolating from pure blending-in (step
0 emits only life-profile activity) to the full recon+exfiltration profile,
with per-step intensity (i/(n-1))**exponent. Each step's attack actions are
a prefix of the full profile, ordered the way an attacker escalates: probes,
then share listing, then sensitive reads, then exfiltration and cleanup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..lifegen import CNC_ADDRESS, Action, World


@dataclass(frozen=True)
class PoisonStep:
    intensity: float
    actions: tuple[Action, ...]
    benign_s: float
    repeats: int = 1


def full_attack_profile(world: World, actor: str | None = None) -> tuple[Action, ...]:
    filesrv = world.hosts[world.file_server]
    pc = sorted(h.id for h in world.zone_hosts(3))[0]
    actor = actor or f"{pc}/rat"
    shares = world.shares.get(filesrv.id, [])
    actions: list[Action] = [
        Action("tcp_probe", actor, {"host": filesrv.id, "port": 445}),
        Action("tcp_probe", actor, {"host": filesrv.id, "port": 22}),
        Action("list_shares", actor, {"host": filesrv.id}),
    ]
    for share in shares:
        if not share.sensitive:
            actions.append(Action("read_file", actor, {"host": filesrv.id, "path": share.path}))
    for share in shares:
        if share.sensitive:
            actions.append(Action("read_file", actor, {"host": filesrv.id, "path": share.path}))
    for share in shares:
        if share.sensitive:
            actions.append(Action("exfiltrate", actor,
                                  {"host": filesrv.id, "path": share.path,
                                   "destination": CNC_ADDRESS}))
    actions.append(Action("delete_logs", actor, {"host": pc}))
    return tuple(actions)


def poison_schedule(
    n_steps: int,
    exponent: float,
    world: World,
    *,
    benign_s: float = 1.0,
    repeats: int = 6,
) -> list[PoisonStep]:
    """Daily plans with strictly increasing intensity (for exponent > 0)."""
    if n_steps < 2:
        raise ValueError("schedule needs at least 2 steps")
    profile = full_attack_profile(world)
    steps = []
    for i in range(n_steps):
        x = (i / (n_steps - 1)) ** exponent
        count = math.ceil(x * len(profile))
        steps.append(
            PoisonStep(intensity=x, actions=profile[:count], benign_s=benign_s, repeats=repeats)
        )
    return steps
