"""Recon environment: a fixed action universe over a private World replica.

The universe enumerates every instantiable command for the world's address
space, giving the policy a stable index space; knowledge gates the validity
mask. Rewards pay for genuinely new inventory items by difficulty tier,
waiting is penalized, and in joint-learning mode the defender's threat score
on the emitted events is subtracted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..lifegen import PROBE_PORTS, Action, World, execute, truth
from .commands import HTTP_PATHS, MAX_SHARE_SLOTS, AgentKnowledge, CommandDictionary
from .knowledge import EpisodeTrace, merge_findings, parse_outcome

WEB_PORTS = (80, 443, 8080)


@dataclass(frozen=True)
class RewardConfig:
    tier_bonus: dict = field(default_factory=lambda: {"trivial": 1.0, "probe": 3.0, "sequence": 6.0})
    action_cost: float = 0.05
    wait_penalty: float = 0.5
    stealth_weight: float = 0.0
    normalize: bool = False

    def __post_init__(self):
        if self.wait_penalty <= 0:
            raise ValueError("wait penalty must be strictly positive (it is subtracted)")


def reward(new_keys: list[str], tiers: dict[str, str], action: Action, rc: RewardConfig,
           threat: float | None = None) -> float:
    """Score one step: tier bonuses for new knowledge minus costs."""
    r = sum(rc.tier_bonus.get(tiers.get(key, "trivial"), 0.0) for key in new_keys)
    r -= rc.action_cost
    if action.command == "wait":
        r -= rc.wait_penalty
    if threat is not None:
        r -= rc.stealth_weight * threat
    if rc.normalize:
        r = min(max(r, 0.0), 1.0)
    return r


@dataclass(frozen=True)
class ActionSlot:
    command: str
    host_index: int  # -1 for global commands
    detail: int  # port index / path index / share slot


class ReconEnv:
    """Episode mechanics for one agent position (external or internal)."""

    def __init__(
        self,
        world: World,
        dictionary: CommandDictionary,
        rc: RewardConfig,
        *,
        actor: str,
        episode_len: int = 100,
        threat_fn=None,
    ):
        self.world = world
        self.dictionary = dictionary
        self.rc = rc
        self.actor = actor
        self.episode_len = episode_len
        self.threat_fn = threat_fn
        self.addresses = tuple(sorted(h.address for h in world.hosts.values() if h.zone != 6))
        self.tiers = {item.key: item.tier for item in truth(world).items}
        self.universe = self._build_universe()
        self.state_dim = 5 * len(self.addresses) + 2
        self.reset()

    def _build_universe(self) -> list[ActionSlot]:
        names = set(self.dictionary.names())
        slots: list[ActionSlot] = []
        if "wait" in names:
            slots.append(ActionSlot("wait", -1, 0))
        if "ping_sweep" in names:
            slots.append(ActionSlot("ping_sweep", -1, 0))
        for hi in range(len(self.addresses)):
            if "tcp_probe" in names:
                for pi in range(len(PROBE_PORTS)):
                    slots.append(ActionSlot("tcp_probe", hi, pi))
            if "banner_grab" in names:
                for pi in range(len(PROBE_PORTS)):
                    slots.append(ActionSlot("banner_grab", hi, pi))
            if "http_get" in names:
                for pi in range(len(HTTP_PATHS)):
                    slots.append(ActionSlot("http_get", hi, pi))
            if "list_shares" in names:
                slots.append(ActionSlot("list_shares", hi, 0))
            if "read_file" in names:
                for si in range(MAX_SHARE_SLOTS):
                    slots.append(ActionSlot("read_file", hi, si))
        return slots

    @property
    def n_actions(self) -> int:
        return len(self.universe)

    def reset(self) -> np.ndarray:
        self.knowledge = AgentKnowledge(address_space=self.addresses)
        self.step_index = 0
        self.last_success = 0.0
        self.trace_actions: list[str] = []
        self.trace_new: list[int] = []
        self.trace_rewards: list[float] = []
        return self.state()

    def state(self) -> np.ndarray:
        v = np.zeros(self.state_dim)
        for i, addr in enumerate(self.addresses):
            h = self.knowledge.hosts.get(addr)
            if h is None:
                continue
            base = 5 * i
            v[base] = 1.0 if h.alive else 0.0
            v[base + 1] = len(h.ports) / len(PROBE_PORTS)
            v[base + 2] = len(h.open_ports()) / len(PROBE_PORTS)
            v[base + 3] = len(h.services) / len(PROBE_PORTS)
            v[base + 4] = 1.0 if h.shares else 0.0
        v[-2] = self.last_success
        v[-1] = self.step_index / self.episode_len
        return v

    def valid_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_actions, dtype=bool)
        blind_left = 2
        blind_allowed: set = set()
        for i, addr in enumerate(self.addresses):
            h = self.knowledge.hosts.get(addr)
            if not (h and h.alive) and blind_left > 0:
                blind_allowed.add(i)
                blind_left -= 1
        # Redundant actions stay valid (they just pay nothing): choosing
        # efficiently is the thing the agent has to learn.
        for ai, slot in enumerate(self.universe):
            if slot.command in ("wait", "ping_sweep"):
                mask[ai] = True
                continue
            addr = self.addresses[slot.host_index]
            h = self.knowledge.hosts.get(addr)
            alive = bool(h and h.alive)
            if slot.command == "tcp_probe":
                mask[ai] = alive or slot.host_index in blind_allowed
            elif not alive:
                mask[ai] = False
            elif slot.command == "banner_grab":
                mask[ai] = h.ports.get(PROBE_PORTS[slot.detail]) == "open"
            elif slot.command == "http_get":
                mask[ai] = any(h.ports.get(p) == "open" for p in WEB_PORTS)
            elif slot.command == "list_shares":
                mask[ai] = h.ports.get(445) == "open"
            elif slot.command == "read_file":
                mask[ai] = slot.detail < len(h.shares)
        return mask

    def to_action(self, index: int) -> Action:
        slot = self.universe[index]
        if slot.command == "wait":
            return Action("wait", self.actor)
        if slot.command == "ping_sweep":
            return Action("ping_sweep", self.actor)
        addr = self.addresses[slot.host_index]
        if slot.command == "tcp_probe":
            return Action("tcp_probe", self.actor, {"host": addr, "port": PROBE_PORTS[slot.detail]})
        if slot.command == "banner_grab":
            return Action("banner_grab", self.actor, {"host": addr, "port": PROBE_PORTS[slot.detail]})
        if slot.command == "http_get":
            return Action("http_get", self.actor, {"host": addr, "path": HTTP_PATHS[slot.detail]})
        if slot.command == "list_shares":
            return Action("list_shares", self.actor, {"host": addr})
        h = self.knowledge.hosts.get(addr)
        path = h.shares[slot.detail] if h and slot.detail < len(h.shares) else "/"
        return Action("read_file", self.actor, {"host": addr, "path": path})

    def step(self, index: int) -> tuple[np.ndarray, float, bool, list]:
        action = self.to_action(index)
        outcome = execute(self.world, action)
        findings = parse_outcome(outcome)
        new_keys = merge_findings(self.knowledge, action, findings)
        threat = None
        if self.threat_fn is not None:
            threat = self.threat_fn(outcome.events)
        r = reward(new_keys, self.tiers, action, self.rc, threat)
        self.last_success = 1.0 if outcome.success else 0.0
        self.step_index += 1
        self.trace_actions.append(action.command)
        self.trace_new.append(len(new_keys))
        self.trace_rewards.append(r)
        done = self.step_index >= self.episode_len
        return self.state(), r, done, outcome.events

    def trace(self) -> EpisodeTrace:
        return EpisodeTrace(
            actions=tuple(self.trace_actions),
            new_keys_per_step=tuple(self.trace_new),
            rewards=tuple(self.trace_rewards),
        )
