"""Low-level command dictionary and knowledge-gated action enumeration."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..lifegen import PROBE_PORTS, Action

PHASES = (
    "reconnaissance",
    "weaponization",
    "delivery",
    "exploitation",
    "installation",
    "command_control",
    "actions_on_objectives",
)

HTTP_PATHS = ("/", "/version-check")

MAX_SHARE_SLOTS = 4
BLIND_PROBE_SLOTS = 2


@dataclass(frozen=True)
class CommandTemplate:
    name: str
    phase: str
    params: tuple[str, ...]
    cost_s: float

    def __post_init__(self):
        if self.phase not in PHASES:
            raise ValueError(f"unknown phase {self.phase!r}")
        if self.name == "wait" and self.params:
            raise ValueError("wait takes no parameters")


@dataclass(frozen=True)
class CommandDictionary:
    templates: tuple[CommandTemplate, ...]

    def names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.templates)

    def for_phase(self, phase: str) -> "CommandDictionary":
        return CommandDictionary(tuple(t for t in self.templates if t.phase == phase))

    def get(self, name: str) -> CommandTemplate:
        for t in self.templates:
            if t.name == name:
                return t
        raise KeyError(name)


def default_dictionary() -> CommandDictionary:
    return CommandDictionary(
        (
            CommandTemplate("ping_sweep", "reconnaissance", (), 5.0),
            CommandTemplate("tcp_probe", "reconnaissance", ("host", "port"), 1.0),
            CommandTemplate("banner_grab", "reconnaissance", ("host", "port"), 1.0),
            CommandTemplate("http_get", "reconnaissance", ("host", "path"), 1.0),
            CommandTemplate("list_shares", "command_control", ("host",), 2.0),
            CommandTemplate("read_file", "actions_on_objectives", ("host", "path"), 2.0),
            CommandTemplate("exfiltrate", "actions_on_objectives", ("host", "path", "destination"), 5.0),
            CommandTemplate("delete_logs", "actions_on_objectives", ("host",), 2.0),
            CommandTemplate("upload_payload", "delivery", ("host", "path"), 3.0),
            CommandTemplate("deface", "exploitation", ("host",), 2.0),
            CommandTemplate("download", "installation", ("host", "path"), 3.0),
            CommandTemplate("run_payload", "installation", ("path",), 1.0),
            CommandTemplate("wait", "reconnaissance", (), 1.0),
        )
    )


def recon_dictionary() -> CommandDictionary:
    """Agent-driven subset: the port-scan phases are automated, the rest of
    the kill chain is scripted."""
    d = default_dictionary()
    keep = {"ping_sweep", "tcp_probe", "banner_grab", "http_get", "list_shares", "wait"}
    return CommandDictionary(tuple(t for t in d.templates if t.name in keep))


@dataclass
class HostKnowledge:
    address: str
    alive: bool = False
    ports: dict[int, str] = field(default_factory=dict)  # port -> open|closed|filtered
    services: dict[int, str] = field(default_factory=dict)  # port -> service/version
    shares: list[str] = field(default_factory=list)
    fetched_paths: set = field(default_factory=set)
    read_paths: set = field(default_factory=set)
    vuln: str | None = None

    def open_ports(self) -> list[int]:
        return sorted(p for p, s in self.ports.items() if s == "open")


@dataclass
class AgentKnowledge:
    """Everything the agent has established about the theatre.

    ``address_space`` is the agent's prior (target ranges), not knowledge;
    discovery state is keyed per address.
    """

    address_space: tuple[str, ...]
    hosts: dict[str, HostKnowledge] = field(default_factory=dict)

    def host(self, address: str) -> HostKnowledge:
        if address not in self.hosts:
            self.hosts[address] = HostKnowledge(address=address)
        return self.hosts[address]

    def discovered(self) -> list[str]:
        return [a for a in self.address_space if self.hosts.get(a, None) and self.hosts[a].alive]

    def truth_keys(self) -> set:
        """Projection onto the inventory key space (kept sound vs WorldTruth)."""
        keys: set = set()
        for addr, h in self.hosts.items():
            if h.alive:
                keys.add(f"host:{addr}")
            for port, state in h.ports.items():
                if state == "open":
                    keys.add(f"port:{addr}:{port}")
            for port, service in h.services.items():
                keys.add(f"service:{addr}:{port}:{service}")
            for path in h.shares:
                keys.add(f"share:{addr}:{path}")
            if h.vuln:
                keys.add(f"vuln:{addr}:{h.vuln}")
        return keys


def enumerate_actions(
    d: CommandDictionary,
    k: AgentKnowledge,
    *,
    actor: str,
    cap: int = 512,
) -> list[Action]:
    """Instantiate templates consistent with current knowledge, in a fixed
    deterministic order, plus a bounded set of blind probes."""
    names = set(d.names())
    actions: list[Action] = []
    if "wait" in names:
        actions.append(Action("wait", actor))
    if "ping_sweep" in names:
        actions.append(Action("ping_sweep", actor))
    blind_budget = BLIND_PROBE_SLOTS
    for addr in k.address_space:
        h = k.hosts.get(addr)
        alive = bool(h and h.alive)
        if not alive:
            if blind_budget <= 0:
                continue
            blind_budget -= 1
        hk = k.host(addr) if alive else (h or HostKnowledge(address=addr))
        if "tcp_probe" in names:
            for port in PROBE_PORTS:
                actions.append(Action("tcp_probe", actor, {"host": addr, "port": port}))
        if not alive:
            continue
        if "banner_grab" in names:
            for port in hk.open_ports():
                actions.append(Action("banner_grab", actor, {"host": addr, "port": port}))
        if "http_get" in names and any(p in (80, 443, 8080) for p in hk.open_ports()):
            for path in HTTP_PATHS:
                actions.append(Action("http_get", actor, {"host": addr, "path": path}))
        if "list_shares" in names and hk.ports.get(445) == "open":
            actions.append(Action("list_shares", actor, {"host": addr}))
        if "read_file" in names:
            for path in hk.shares[:MAX_SHARE_SLOTS]:
                actions.append(Action("read_file", actor, {"host": addr, "path": path}))
    return actions[:cap]
