"""Benign life-traffic generator.

Each machine emits ~100 events/s (Poisson), split 60% os / 30% network /
10% application. Traffic follows stable per-host behavioural profiles
(process mix, destination affinities, diurnal intensity on the numeric
metrics) so a behaviour model has structure to learn, and it embeds the two
frequent-structure shapes the correlator compresses: concomitant cascades
(exec followed by library loads) and block-repeated reads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..events import Event
from .world import World

LIB_PATHS = tuple(f"/usr/lib/libcommon{i}.so" for i in range(1, 4))

DOC_PATHS = tuple(f"/home/user/docs/report{i}.docx" for i in range(1, 9))
CACHE_PATHS = tuple(f"/var/cache/app/blob{i}" for i in range(1, 7))
DATA_PATHS = tuple(f"/var/lib/service/data{i}.db" for i in range(1, 5))

APPS = ("shop", "wiki", "mail", "telemetry")
APP_ENDPOINTS = {
    "shop": ("/", "/search", "/items", "/cart"),
    "wiki": ("/wiki/home", "/wiki/recent"),
    "mail": ("/inbox", "/send"),
    "telemetry": ("/beacon",),
}

OS_ACTIONS = ("read", "write", "open", "exec", "syscall")
OS_ACTION_P = (0.45, 0.20, 0.20, 0.05, 0.10)

PRIORITIES = ("low", "normal", "high")

CASCADE_LEN = 1 + len(LIB_PATHS)  # exec + its library loads
REPEAT_LEN = 6


@dataclass(frozen=True)
class HostProfile:
    proc_p: np.ndarray
    dest_ids: tuple[str, ...]
    dest_ports: tuple[int, ...]
    dest_p: np.ndarray
    app_p: np.ndarray
    bytes_mu: float


def _profiles(world: World) -> dict[str, HostProfile]:
    cached = getattr(world, "_profiles", None)
    if cached is not None:
        return cached
    rng = np.random.default_rng(world.config.seed + 7_919)
    hosts = sorted(world.hosts)
    profiles: dict[str, HostProfile] = {}
    service_targets = [
        h for h in (world.web_server, "proxy", world.file_server, "admin") if h in world.hosts
    ]
    for hid in hosts:
        host = world.hosts[hid]
        proc_p = rng.dirichlet(np.full(len(host.processes), 4.0))
        dests, ports = [], []
        for target in service_targets:
            if target == hid:
                continue
            dests.append(target)
            open_ports = [p for p, v in world.hosts[target].ports.items() if v.state == "open"]
            ports.append(open_ports[0] if open_ports else 445)
        dest_p = rng.dirichlet(np.full(len(dests), 3.0)) if dests else np.array([])
        app_p = rng.dirichlet(np.full(len(APPS), 3.0))
        # Noisy telemetry stays a small slice everywhere.
        app_p[-1] = 0.05
        app_p = app_p / app_p.sum()
        profiles[hid] = HostProfile(
            proc_p=proc_p,
            dest_ids=tuple(dests),
            dest_ports=tuple(ports),
            dest_p=dest_p,
            app_p=app_p,
            bytes_mu=float(rng.normal(8.5, 0.4)),
        )
    world._profiles = profiles  # type: ignore[attr-defined]
    return profiles


def diurnal_factor(clock_ms: int) -> float:
    """Working-hours intensity in [0.5, 1.0], peaking early afternoon."""
    hour = (clock_ms % 86_400_000) / 3_600_000
    return 0.5 + 0.5 * math.exp(-((hour - 13.0) ** 2) / (2 * 4.0**2))


def _paths_for(proc: str) -> tuple[str, ...]:
    if proc in ("chrome", "office", "explorer"):
        return DOC_PATHS + CACHE_PATHS[:3]
    if proc in ("backupd", "smbd"):
        return DATA_PATHS + DOC_PATHS[:2]
    return CACHE_PATHS + DATA_PATHS[:2]


def _os_event(world: World, host_id: str, proc: str, action: str, resource: str, ts: int,
              diurnal: float, rng: np.random.Generator) -> Event:
    bytes_ = float(rng.lognormal(_profiles(world)[host_id].bytes_mu + math.log(diurnal), 0.6))
    metrics = {
        "bytes": round(bytes_, 1),
        "duration_ms": round(float(rng.gamma(2.0, 8.0)), 2),
        "cpu": round(float(rng.beta(2.0, 8.0)) * 100.0 * diurnal, 2),
        "result": "ok" if rng.random() < 0.985 else "denied",
        "priority": PRIORITIES[int(rng.choice(3, p=(0.2, 0.7, 0.1)))],
    }
    if rng.random() < 0.5:
        metrics["mem_kb"] = int(rng.integers(200, 4_000))
    if rng.random() < 0.3:
        metrics["tid"] = int(rng.integers(1, 64))
    return Event(
        id=world.next_event_id(),
        ts=ts,
        actor=f"{host_id}/{proc}",
        action=action,
        location=host_id,
        resource=resource,
        source="os",
        metrics=metrics,
    )


def _network_event(world: World, host_id: str, dest: str, port: int, ts: int,
                   diurnal: float, rng: np.random.Generator) -> Event:
    dst_host = world.hosts[dest]
    filtered = dst_host.port_state(port) != "open"
    metrics = {
        "port": str(port),
        "proto": "tcp" if rng.random() < 0.95 else "udp",
        "bytes_out": round(float(rng.lognormal(6.0 + math.log(diurnal), 0.7)), 1),
        "bytes_in": round(float(rng.lognormal(8.0 + math.log(diurnal), 0.8)), 1),
        "duration_ms": round(float(rng.gamma(2.0, 20.0)), 2),
        "result": "reset" if filtered else "ok",
    }
    if rng.random() < 0.4:
        metrics["ttl"] = int(rng.integers(48, 128))
    return Event(
        id=world.next_event_id(),
        ts=ts,
        actor=host_id,
        action="connect",
        location=host_id,
        resource=dst_host.address,
        source="network",
        metrics=metrics,
    )


def _app_event(world: World, host_id: str, app: str, ts: int, diurnal: float,
               rng: np.random.Generator) -> Event:
    endpoints = APP_ENDPOINTS[app]
    metrics = {
        "status": str(int(rng.choice((200, 302, 404), p=(0.90, 0.05, 0.05)))),
        "method": "GET" if rng.random() < 0.8 else "POST",
        "latency_ms": round(float(rng.lognormal(3.5, 0.5)), 2),
        "size_bytes": round(float(rng.lognormal(7.5 + math.log(diurnal), 0.6)), 1),
        "session_len": int(rng.integers(1, 40)),
    }
    if rng.random() < 0.35:
        metrics["cache"] = "hit" if rng.random() < 0.7 else "miss"
    return Event(
        id=world.next_event_id(),
        ts=ts,
        actor=host_id,
        action="app_request",
        location=app,
        resource=endpoints[int(rng.integers(0, len(endpoints)))],
        source="application",
        metrics=metrics,
    )


def _host_events_for_second(world: World, host_id: str, second_ms: int,
                            rng: np.random.Generator) -> list[Event]:
    profile = _profiles(world)[host_id]
    host = world.hosts[host_id]
    n = int(rng.poisson(world.config.rate_per_host))
    if n == 0:
        return []
    diurnal = diurnal_factor(second_ms)
    sources = rng.choice(3, size=n, p=world.config.source_mix)
    offsets = np.sort(rng.integers(0, 1000, size=n))
    events: list[Event] = []
    os_positions = [i for i in range(n) if sources[i] == 0]
    # Partition the os slots into cascades, block-repeat runs and singles.
    i = 0
    pending: list[tuple[int, str, str, str]] = []  # (position, proc, action, resource)
    while i < len(os_positions):
        left = len(os_positions) - i
        u = rng.random()
        proc = host.processes[int(rng.choice(len(host.processes), p=profile.proc_p))]
        if u < 0.05 and left >= CASCADE_LEN:
            pending.append((os_positions[i], proc, "exec", f"/usr/bin/{proc}"))
            for j, lib in enumerate(LIB_PATHS, start=1):
                pending.append((os_positions[i + j], proc, "read", lib))
            i += CASCADE_LEN
        elif u < 0.09 and left >= REPEAT_LEN:
            paths = _paths_for(proc)
            path = paths[int(rng.integers(0, len(paths)))]
            for j in range(REPEAT_LEN):
                pending.append((os_positions[i + j], proc, "read", path))
            i += REPEAT_LEN
        else:
            action = OS_ACTIONS[int(rng.choice(len(OS_ACTIONS), p=OS_ACTION_P))]
            if action == "write" and rng.random() < 0.15:
                resource = f"/tmp/tmp{rng.integers(0, 0xFFFF):04X}"
            else:
                paths = _paths_for(proc)
                resource = paths[int(rng.integers(0, len(paths)))]
            pending.append((os_positions[i], proc, action, resource))
            i += 1
    os_by_pos = {pos: rest for pos, *rest in pending}
    for pos in range(n):
        ts = second_ms + int(offsets[pos])
        if sources[pos] == 0:
            proc, action, resource = os_by_pos[pos]
            events.append(_os_event(world, host_id, proc, action, resource, ts, diurnal, rng))
        elif sources[pos] == 1:
            if len(profile.dest_ids) == 0:
                events.append(_os_event(world, host_id, host.processes[0], "syscall",
                                        CACHE_PATHS[0], ts, diurnal, rng))
                continue
            k = int(rng.choice(len(profile.dest_ids), p=profile.dest_p))
            events.append(_network_event(world, host_id, profile.dest_ids[k],
                                         profile.dest_ports[k], ts, diurnal, rng))
        else:
            app = APPS[int(rng.choice(len(APPS), p=profile.app_p))]
            events.append(_app_event(world, host_id, app, ts, diurnal, rng))
    return events


def step_benign(world: World, duration_s: float) -> list[Event]:
    """Advance the simulated clock, emitting life traffic for every machine.

    Returns the emitted events time-ordered. Deterministic for a given
    (world config, seed, clock) state.
    """
    if duration_s <= 0:
        return []
    events: list[Event] = []
    hosts = sorted(world.hosts)
    whole = int(duration_s)
    for _ in range(whole):
        second_ms = world.clock_ms
        batch: list[Event] = []
        for host_id in hosts:
            batch.extend(_host_events_for_second(world, host_id, second_ms, world.rng))
        batch.sort(key=lambda e: (e.ts, e.id))
        events.extend(batch)
        world.clock_ms += 1000
    world.clock_ms += int((duration_s - whole) * 1000)
    return events
