"""Simulated information system: six zones, hosts, services, shares.

The world is a deterministic discrete-event state machine with a simulated
clock. Zone roles: 1 DMZ (proxy / reverse proxy), 2 web server (carries the
vulnerable version-check endpoint), 3 user PCs, 4 infrastructure incl. the
file server, 5 administration, 6 SOC. The red-team side sits outside and
reaches the system through a simulated internet.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

import numpy as np

ATTACKER_ADDRESS = "45.251.23.2"
CNC_ADDRESS = "52.95.245.2"
EXTERNAL_LOCATION = "external"

ZONE_ROLES = {
    1: "dmz",
    2: "web",
    3: "users",
    4: "infrastructure",
    5: "administration",
    6: "soc",
}

DEFAULT_ZONE_SIZES = {1: 2, 2: 1, 3: 8, 4: 1, 5: 1, 6: 1}


class WorldError(ValueError):
    pass


@dataclass(frozen=True)
class TopologyConfig:
    zone_sizes: dict[int, int] = field(default_factory=lambda: dict(DEFAULT_ZONE_SIZES))
    seed: int = 42
    rate_per_host: float = 100.0
    source_mix: tuple[float, float, float] = (0.60, 0.30, 0.10)
    seconds_per_action: float = 1.0

    def __post_init__(self):
        # JSON object keys arrive as strings
        object.__setattr__(self, "zone_sizes", {int(k): int(v) for k, v in self.zone_sizes.items()})
        object.__setattr__(self, "source_mix", tuple(self.source_mix))

    @classmethod
    def from_file(cls, path) -> "TopologyConfig":
        with open(path, encoding="utf-8") as fh:
            return cls(**json.load(fh))


@dataclass
class Port:
    state: str  # open | closed | filtered
    service: str = ""
    version: str = ""


@dataclass
class Host:
    id: str
    zone: int
    address: str
    ports: dict[int, Port] = field(default_factory=dict)
    vulnerable: bool = False
    processes: tuple[str, ...] = ()

    def port_state(self, port: int) -> str:
        if port in self.ports:
            return self.ports[port].state
        return "closed"


@dataclass
class Share:
    path: str
    size: int
    sensitive: bool


@dataclass
class World:
    config: TopologyConfig
    hosts: dict[str, Host]
    shares: dict[str, list[Share]]  # host id -> shares
    clock_ms: int
    rng: np.random.Generator
    web_server: str
    file_server: str
    planted_files: dict[str, dict[str, int]] = field(default_factory=dict)  # host -> path -> size
    defaced: set = field(default_factory=set)
    logs_wiped: set = field(default_factory=set)
    event_counter: int = 0

    def host_by_address(self, address: str) -> Host | None:
        for h in self.hosts.values():
            if h.address == address:
                return h
        return None

    def zone_hosts(self, zone: int) -> list[Host]:
        return [h for h in self.hosts.values() if h.zone == zone]

    def next_event_id(self) -> str:
        self.event_counter += 1
        return f"ev-{self.event_counter:09d}"

    def address_map(self) -> dict[str, str]:
        """address -> host id, for resolving graph entities."""
        return {h.address: h.id for h in self.hosts.values()}

    def copy(self) -> "World":
        """Independent replica (private RNG state, private mutable state)."""
        return copy.deepcopy(self)


def _host_ports(role: str, index: int) -> tuple[dict[int, Port], tuple[str, ...]]:
    if role == "dmz":
        if index == 0:
            return {3128: Port("open", "http-proxy", "squid/4.8")}, ("squid", "sysmon")
        return {80: Port("open", "http", "nginx/1.14"), 443: Port("open", "https", "nginx/1.14")}, ("nginx", "sysmon")
    if role == "web":
        return (
            {80: Port("open", "http", "httpd/2.4"), 22: Port("open", "ssh", "openssh/7.6")},
            ("httpd", "bash", "sysmon"),
        )
    if role == "users":
        return {445: Port("filtered", "smb", ""), 22: Port("closed", "ssh", "")}, (
            "chrome",
            "office",
            "explorer",
            "updater",
        )
    if role == "infrastructure":
        return (
            {445: Port("open", "smb", "smbd/3.1"), 22: Port("open", "ssh", "openssh/7.6")},
            ("smbd", "backupd", "sysmon"),
        )
    if role == "administration":
        return {22: Port("open", "ssh", "openssh/7.6")}, ("sshd", "ansible", "sysmon")
    return {22: Port("filtered", "ssh", "")}, ("siem", "sysmon")


def _host_name(zone: int, role: str, index: int) -> str:
    if role == "dmz":
        return "proxy" if index == 0 else ("rproxy" if index == 1 else f"dmz{index + 1:02d}")
    if role == "web":
        return "websrv" if index == 0 else f"web{index + 1:02d}"
    if role == "users":
        return f"PC{index + 1:02d}"
    if role == "infrastructure":
        return "filesrv" if index == 0 else f"infra{index + 1:02d}"
    if role == "administration":
        return "admin" if index == 0 else f"admin{index + 1:02d}"
    return "soc" if index == 0 else f"soc{index + 1:02d}"


# Clock origin: a Monday 00:00 UTC, so hour-of-day and day-of-week features
# line up with the diurnal profile of the generated traffic.
CLOCK_ORIGIN_MS = 1_623_024_000_000


def build_world(cfg: TopologyConfig) -> World:
    """Deterministic world for a given config+seed."""
    if set(cfg.zone_sizes) != set(range(1, 7)):
        raise WorldError("topology must define exactly zones 1..6")
    if cfg.zone_sizes[3] < 1:
        raise WorldError("user zone must contain at least one PC")
    hosts: dict[str, Host] = {}
    for zone in range(1, 7):
        role = ZONE_ROLES[zone]
        for index in range(cfg.zone_sizes[zone]):
            ports, processes = _host_ports(role, index)
            name = _host_name(zone, role, index)
            hosts[name] = Host(
                id=name,
                zone=zone,
                address=f"10.0.{zone}.{index + 10}",
                ports={p: copy.deepcopy(v) for p, v in ports.items()},
                processes=processes,
            )
    web = _host_name(2, "web", 0)
    hosts[web].vulnerable = True  # version-check endpoint backed by a shell interpreter
    filesrv = _host_name(4, "infrastructure", 0)
    shares = {
        filesrv: [
            Share("/share/public/readme.txt", 4_096, sensitive=False),
            Share("/share/public/tools.zip", 1_048_576, sensitive=False),
            Share("/share/finance/ledger.xlsx", 2_359_296, sensitive=True),
            Share("/share/rd/roadmap.pdf", 748_544, sensitive=True),
        ]
    }
    return World(
        config=cfg,
        hosts=hosts,
        shares=shares,
        clock_ms=CLOCK_ORIGIN_MS,
        rng=np.random.default_rng(cfg.seed),
        web_server=web,
        file_server=filesrv,
    )


def reachable(world: World, src: str, dst_host: Host) -> bool:
    """Minimal inter-zone policy: DMZ-mediated ingress, SOC isolated.

    ``src`` is either a host id or an external address. External actors reach
    only zones 1 and 2; internal hosts reach zones 1..5 plus the simulated
    internet; nothing reaches the SOC zone.
    """
    if dst_host.zone == 6:
        return False
    if src in world.hosts:
        return True
    return dst_host.zone in (1, 2)
