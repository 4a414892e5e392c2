"""Terminal/socket command execution against the simulated world.

Every executed action advances the simulated clock, returns a response text
in a frozen per-command format, and emits at least one sensor event. Events
whose location lies outside the monitored system (e.g. on the attacker's own
machine) are still emitted but never reach the defender's stream.

Blocked cross-zone probes surface as ``filtered`` outcomes logged at the DMZ
boundary (the reverse proxy), mirroring a perimeter firewall sensor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..events import Event
from .world import CNC_ADDRESS, EXTERNAL_LOCATION, World, WorldError, reachable

PROBE_PORTS = (22, 80, 443, 445, 3128, 8080)

WEB_PORTS = (80, 443, 8080)

ACTION_COSTS_S = {
    "ping_sweep": 5.0,
    "tcp_probe": 1.0,
    "banner_grab": 1.0,
    "http_get": 1.0,
    "list_shares": 2.0,
    "read_file": 2.0,
    "exfiltrate": 5.0,
    "delete_logs": 2.0,
    "download": 3.0,
    "upload_payload": 3.0,
    "deface": 2.0,
    "run_payload": 1.0,
    "wait": 1.0,
}

PAYLOAD_PATH = "/srv/www/rat.bin"
INDEX_PATH = "/srv/www/index.html"
LOCAL_RAT_PATH = "/home/user/downloads/rat.bin"
STOREFRONT = "ShopSite storefront v2.3"
DEFACEMENT = "maintenance notice: content replaced"
VULN_BANNER = "version-check ok: interpreter bash/4.2"


@dataclass(frozen=True)
class Action:
    """One instantiated command. ``actor`` is the emitting label: an external
    address, a host id, or a host-scoped process label like ``PC01/rat``."""

    command: str
    actor: str
    params: dict = field(default_factory=dict)

    def actor_host(self) -> str:
        return self.actor.split("/")[0]


@dataclass
class ActionOutcome:
    response: str
    success: bool
    elapsed_s: float
    events: list[Event]


@dataclass(frozen=True)
class TruthItem:
    key: str
    tier: str  # trivial | probe | sequence


@dataclass(frozen=True)
class WorldTruth:
    items: frozenset

    def keys(self) -> frozenset:
        return frozenset(item.key for item in self.items)

    def tier_of(self, key: str) -> str | None:
        for item in self.items:
            if item.key == key:
                return item.tier
        return None


def truth(world: World) -> WorldTruth:
    """Exhaustive inventory of discoverable items with difficulty tiers.

    Hosts are visible to a sweep (trivial); open-port states need a probe;
    service versions, shares and the web vulnerability need a prior
    discovery, i.e. an action sequence. The SOC zone is filtered from
    everywhere and therefore not discoverable.
    """
    items: set[TruthItem] = set()
    for host in world.hosts.values():
        if host.zone == 6:
            continue
        items.add(TruthItem(f"host:{host.address}", "trivial"))
        for port, spec in host.ports.items():
            if spec.state != "open":
                continue
            items.add(TruthItem(f"port:{host.address}:{port}", "probe"))
            items.add(TruthItem(f"service:{host.address}:{port}:{spec.service}/{spec.version}", "sequence"))
        for share in world.shares.get(host.id, ()):
            items.add(TruthItem(f"share:{host.address}:{share.path}", "sequence"))
        if host.vulnerable:
            items.add(TruthItem(f"vuln:{host.address}:bash/4.2", "sequence"))
    return WorldTruth(items=frozenset(items))


def _is_external(world: World, actor_host: str) -> bool:
    return actor_host not in world.hosts


def _net_metrics(world: World, port, proto, bytes_out, bytes_in, result) -> dict:
    return {
        "port": str(port),
        "proto": proto,
        "bytes_out": round(float(bytes_out), 1),
        "bytes_in": round(float(bytes_in), 1),
        "duration_ms": round(float(world.rng.gamma(2.0, 15.0)), 2),
        "result": result,
    }


def _os_metrics(world: World, bytes_) -> dict:
    return {
        "bytes": round(float(bytes_), 1),
        "duration_ms": round(float(world.rng.gamma(2.0, 8.0)), 2),
        "cpu": round(float(world.rng.beta(2.0, 8.0)) * 100.0, 2),
        "result": "ok",
        "priority": "normal",
    }


def _app_metrics(world: World, status, method, size) -> dict:
    return {
        "status": str(status),
        "method": method,
        "latency_ms": round(float(world.rng.lognormal(3.5, 0.4)), 2),
        "size_bytes": round(float(size), 1),
        "session_len": 1,
    }


def _event(world: World, ts, actor, action, location, resource, source, metrics) -> Event:
    return Event(
        id=world.next_event_id(),
        ts=ts,
        actor=actor,
        action=action,
        location=location,
        resource=resource,
        source=source,
        metrics=metrics,
    )


def _probe_like(world: World, action: Action, target, port: int, verb: str, ts: int) -> tuple[str, list[Event]]:
    """Shared emission for probe/ping/banner traffic, boundary-logged when blocked."""
    if reachable(world, action.actor_host(), target):
        state = target.port_state(port) if verb != "ping" else "open"
        location = target.id
    else:
        state = "filtered"
        location = "rproxy" if "rproxy" in world.hosts else sorted(world.hosts)[0]
    bytes_in = 60.0 if state == "open" else 0.0
    event = _event(
        world, ts, action.actor, verb, location, target.address, "network",
        _net_metrics(world, port, "tcp" if verb != "ping" else "icmp", 60.0, bytes_in, state),
    )
    return state, [event]


def execute(world: World, action: Action) -> ActionOutcome:
    """Run one command, mutating world state and emitting sensor events."""
    handler = _HANDLERS.get(action.command)
    if handler is None:
        raise WorldError(f"unknown command {action.command!r}")
    cost = ACTION_COSTS_S[action.command] * world.config.seconds_per_action
    ts = world.clock_ms
    response, success, events = handler(world, action, ts)
    world.clock_ms += int(cost * 1000)
    if not events:
        raise WorldError(f"command {action.command} emitted no sensor event")
    return ActionOutcome(response=response, success=success, elapsed_s=cost, events=events)


def _resolve_target(world: World, action: Action):
    ref = action.params.get("host", "")
    if ref in world.hosts:
        return world.hosts[ref]
    return world.host_by_address(str(ref))


def _h_wait(world, action, ts):
    host = action.actor_host()
    location = host if host in world.hosts else EXTERNAL_LOCATION
    event = _event(world, ts, action.actor if "/" in action.actor else f"{host}/idle",
                   "syscall", location, "/proc/self/status", "os", _os_metrics(world, 128.0))
    return "idle", True, [event]


def _h_ping_sweep(world, action, ts):
    src = action.actor_host()
    alive, events = [], []
    for hid in sorted(world.hosts):
        target = world.hosts[hid]
        if target.zone == 6:
            continue
        if reachable(world, src, target):
            alive.append(target.address)
            events.append(_event(world, ts, action.actor, "ping", target.id, target.address,
                                 "network", _net_metrics(world, 0, "icmp", 64.0, 64.0, "ok")))
    response = "\n".join(f"{addr} alive" for addr in alive) if alive else "no hosts up"
    if not events:
        events.append(_event(world, ts, action.actor, "ping", EXTERNAL_LOCATION, "0.0.0.0",
                             "network", _net_metrics(world, 0, "icmp", 64.0, 0.0, "ok")))
    return response, bool(alive), events


def _h_tcp_probe(world, action, ts):
    target = _resolve_target(world, action)
    if target is None:
        return "probe error: unknown host", False, [
            _event(world, ts, action.actor, "probe", EXTERNAL_LOCATION, str(action.params.get("host")),
                   "network", _net_metrics(world, action.params.get("port", 0), "tcp", 60.0, 0.0, "noroute"))
        ]
    port = int(action.params["port"])
    state, events = _probe_like(world, action, target, port, "probe", ts)
    if state == "open":
        service = target.ports[port].service
        response = f"{target.address} {port}/open {service}"
    else:
        response = f"{target.address} {port}/{state}"
    return response, state == "open", events


def _h_banner_grab(world, action, ts):
    target = _resolve_target(world, action)
    if target is None:
        return "banner error: unknown host", False, [
            _event(world, ts, action.actor, "banner", EXTERNAL_LOCATION, str(action.params.get("host")),
                   "network", _net_metrics(world, action.params.get("port", 0), "tcp", 60.0, 0.0, "noroute"))
        ]
    port = int(action.params["port"])
    state, events = _probe_like(world, action, target, port, "banner", ts)
    if state == "open":
        spec = target.ports[port]
        return f"{target.address}:{port} {spec.service} {spec.version}", True, events
    return f"{target.address}:{port} no banner", False, events


def _h_http_get(world, action, ts):
    target = _resolve_target(world, action)
    path = str(action.params.get("path", "/"))
    if target is None:
        return "HTTP -1 unreachable", False, [
            _event(world, ts, action.actor, "http_get", EXTERNAL_LOCATION, path, "application",
                   _app_metrics(world, -1, "GET", 0.0))
        ]
    open_web = next((p for p in WEB_PORTS if target.port_state(p) == "open"), None)
    if open_web is None or not reachable(world, action.actor_host(), target):
        state, events = _probe_like(world, action, target, open_web or 80, "probe", ts)
        return "HTTP -1 unreachable", False, events
    if target.id == world.web_server:
        if path == "/":
            body = DEFACEMENT if target.id in world.defaced else STOREFRONT
            status = 200
        elif path == "/version-check":
            body = VULN_BANNER
            status = 200
        else:
            body, status = "not found", 404
        app = "shop"
    else:
        body, status = ("gateway index", 200) if path == "/" else ("not found", 404)
        app = target.id
    event = _event(world, ts, action.actor, "http_get", app, path, "application",
                   _app_metrics(world, status, "GET", float(len(body) * 16)))
    return f"HTTP {status} {body}", status == 200, [event]


def _h_list_shares(world, action, ts):
    target = _resolve_target(world, action)
    if target is None or not reachable(world, action.actor_host(), target):
        return "smb error: unreachable", False, [
            _event(world, ts, action.actor, "smb_list", "rproxy" if "rproxy" in world.hosts else EXTERNAL_LOCATION,
                   str(action.params.get("host")), "network",
                   _net_metrics(world, 445, "tcp", 120.0, 0.0, "filtered"))
        ]
    event = _event(world, ts, action.actor, "smb_list", target.id, target.address, "network",
                   _net_metrics(world, 445, "tcp", 120.0, 480.0, "ok"))
    if target.port_state(445) != "open":
        return "no shares (smb unavailable)", False, [event]
    shares = world.shares.get(target.id, [])
    lines = [f"share {s.path} {s.size}" for s in shares]
    return "\n".join(lines) if lines else "no shares exported", bool(lines), [event]


def _h_read_file(world, action, ts):
    target = _resolve_target(world, action)
    path = str(action.params.get("path", ""))
    if target is None or not reachable(world, action.actor_host(), target):
        return "read error: unreachable", False, [
            _event(world, ts, action.actor, "read", EXTERNAL_LOCATION, path, "os", _os_metrics(world, 0.0))
        ]
    share = next((s for s in world.shares.get(target.id, []) if s.path == path), None)
    planted = world.planted_files.get(target.id, {}).get(path)
    size = share.size if share else planted
    event = _event(world, ts, action.actor, "read", target.id, path, "os",
                   _os_metrics(world, float(size or 0)))
    if size is None:
        return f"read error: no such file {path}", False, [event]
    return f"read {path} ({size} bytes)", True, [event]


def _h_exfiltrate(world, action, ts):
    path = str(action.params.get("path", ""))
    dest = str(action.params.get("destination", CNC_ADDRESS))
    src_host = action.actor_host()
    host = _resolve_target(world, action) or (world.hosts.get(src_host))
    size = 0
    if host is not None:
        share = next((s for s in world.shares.get(host.id, []) if s.path == path), None)
        size = share.size if share else world.planted_files.get(host.id, {}).get(path, 0)
    location = src_host if src_host in world.hosts else EXTERNAL_LOCATION
    event = _event(world, ts, action.actor, "upload", location, dest, "network",
                   _net_metrics(world, 443, "tcp", float(max(size, 1)), 64.0, "ok"))
    if size == 0:
        return f"exfil error: nothing to send from {path}", False, [event]
    return f"sent {path} ({size} bytes) to {dest}", True, [event]


def _h_delete_logs(world, action, ts):
    host = action.actor_host()
    location = host if host in world.hosts else EXTERNAL_LOCATION
    world.logs_wiped.add(host)
    event = _event(world, ts, action.actor, "delete", location, "/var/log/syslog", "os",
                   _os_metrics(world, 4096.0))
    return f"logs cleared on {host}", True, [event]


def _h_download(world, action, ts):
    src = str(action.params.get("host", ""))
    path = str(action.params.get("path", ""))
    actor_host = action.actor_host()
    location = actor_host if actor_host in world.hosts else EXTERNAL_LOCATION
    if src in world.hosts:
        size = world.planted_files.get(src, {}).get(path)
        scoped = f"{src}:{path}"
    else:
        size = 524_288  # tool drop served by the CnC
        scoped = f"{src}:{path}"
    event = _event(world, ts, action.actor, "download", location, scoped, "network",
                   _net_metrics(world, 80 if src in world.hosts else 443, "tcp", 96.0,
                                float(size or 0), "ok" if size else "notfound"))
    events = [event]
    if size is None:
        return f"download error: no such file {path} on {src}", False, events
    local = LOCAL_RAT_PATH if path.endswith("rat.bin") else f"/home/user/downloads/{path.rsplit('/', 1)[-1]}"
    if actor_host in world.hosts:
        world.planted_files.setdefault(actor_host, {})[local] = size
        writer = action.actor if "/" in action.actor else f"{actor_host}/chrome"
        events.append(_event(world, ts + 40, writer, "write", actor_host, local, "os",
                             _os_metrics(world, float(size))))
    return f"downloaded {path} from {src} ({size} bytes)", True, events


def _h_upload_payload(world, action, ts):
    target = _resolve_target(world, action)
    path = str(action.params.get("path", PAYLOAD_PATH))
    if target is None or not target.vulnerable:
        return "upload failed: endpoint not exploitable", False, [
            _event(world, ts, action.actor, "http_post", "shop" if target and target.id == world.web_server
                   else EXTERNAL_LOCATION, "/version-check", "application",
                   _app_metrics(world, 403, "POST", 512.0))
        ]
    world.planted_files.setdefault(target.id, {})[path] = 524_288
    exploit = _event(world, ts, action.actor, "http_post", "shop", "/version-check", "application",
                     _app_metrics(world, 200, "POST", 524_288.0))
    write = _event(world, ts + 60, f"{target.id}/bash", "write", target.id, path, "os",
                   _os_metrics(world, 524_288.0))
    return f"payload planted at {target.id}:{path}", True, [exploit, write]


def _h_deface(world, action, ts):
    target = _resolve_target(world, action)
    if target is None or PAYLOAD_PATH not in world.planted_files.get(target.id, {}):
        return "deface failed: no foothold", False, [
            _event(world, ts, action.actor, "http_post", EXTERNAL_LOCATION, INDEX_PATH, "application",
                   _app_metrics(world, 403, "POST", 256.0))
        ]
    world.defaced.add(target.id)
    event = _event(world, ts, f"{target.id}/bash", "write", target.id, INDEX_PATH, "os",
                   _os_metrics(world, 18_432.0))
    return f"index.html replaced on {target.id}", True, [event]


def _h_run_payload(world, action, ts):
    host = action.actor_host()
    path = str(action.params.get("path", LOCAL_RAT_PATH))
    if host not in world.hosts or path not in world.planted_files.get(host, {}):
        return f"exec error: no such binary {path}", False, [
            _event(world, ts, action.actor, "exec", host if host in world.hosts else EXTERNAL_LOCATION,
                   path, "os", _os_metrics(world, 0.0))
        ]
    event = _event(world, ts, f"{host}/rat", "exec", host, path, "os",
                   _os_metrics(world, 524_288.0))
    return f"process started {path} on {host}", True, [event]


_HANDLERS = {
    "wait": _h_wait,
    "ping_sweep": _h_ping_sweep,
    "tcp_probe": _h_tcp_probe,
    "banner_grab": _h_banner_grab,
    "http_get": _h_http_get,
    "list_shares": _h_list_shares,
    "read_file": _h_read_file,
    "exfiltrate": _h_exfiltrate,
    "delete_logs": _h_delete_logs,
    "download": _h_download,
    "upload_payload": _h_upload_payload,
    "deface": _h_deface,
    "run_payload": _h_run_payload,
}

COMMANDS = tuple(sorted(_HANDLERS))


def visible_to_defender(world: World, e: Event) -> bool:
    """Defender sensors cover the SI's hosts and applications only."""
    from .traffic import APPS

    return e.location in world.hosts or e.location in APPS or e.location == "shop"
