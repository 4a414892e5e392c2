"""Entity extraction: events name actors/resources, graphs need typed nodes.

An entity is a (type, instance) pair with type in {process, host, address,
file}. Bare paths are scoped by the event's location (``PC01:/tmp/x``);
already host-scoped paths (``websrv:/srv/www/rat.bin``) pass through, so the
same file referenced from two hosts maps to one node. A resolver maps known
internal addresses back to their host ids.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..events import Event

_IPV4 = re.compile(r"^\d{1,3}\.\d{1,3}\.\d{1,3}\.\d{1,3}$")
_SCOPED_PATH = re.compile(r"^[A-Za-z0-9_.-]+:/")

Entity = tuple[str, str]  # (type, instance)

Template = tuple[str, str, str]  # (actor class, action, resource class)


@dataclass(frozen=True)
class EntityView:
    src: Entity
    dst: Entity
    template: Template

    @property
    def type_triple(self) -> tuple[str, str, str]:
        return (self.src[0], self.template[1], self.dst[0])


def classify_actor(label: str, resolver: dict[str, str] | None = None) -> Entity:
    if _IPV4.match(label):
        if resolver and label in resolver:
            return ("host", resolver[label])
        return ("address", label)
    if "/" in label:
        return ("process", label)
    return ("host", label)


def classify_resource(label: str, location: str, resolver: dict[str, str] | None = None) -> Entity:
    if _IPV4.match(label):
        if resolver and label in resolver:
            return ("host", resolver[label])
        return ("address", label)
    if label.startswith("/"):
        return ("file", f"{location}:{label}")
    if _SCOPED_PATH.match(label):
        return ("file", label)
    return ("host", label)


def _actor_class(entity: Entity) -> str:
    etype, instance = entity
    if etype == "process":
        return f"process:{instance.split('/', 1)[1]}"
    return etype


def _resource_class(entity: Entity) -> str:
    etype, instance = entity
    if etype == "file":
        return f"file:{instance.split(':', 1)[1]}"
    if etype == "host":
        return f"host:{instance}"
    return etype


def view(e: Event, resolver: dict[str, str] | None = None) -> EntityView:
    src = classify_actor(e.actor, resolver)
    dst = classify_resource(e.resource, e.location, resolver) if e.resource else ("host", e.location)
    template = (_actor_class(src), e.action, _resource_class(dst))
    return EntityView(src=src, dst=dst, template=template)
