from .world import (
    ATTACKER_ADDRESS,
    CNC_ADDRESS,
    EXTERNAL_LOCATION,
    Host,
    Port,
    Share,
    TopologyConfig,
    World,
    WorldError,
    build_world,
    reachable,
)
from .actions import (
    ACTION_COSTS_S,
    COMMANDS,
    PROBE_PORTS,
    Action,
    ActionOutcome,
    TruthItem,
    WorldTruth,
    execute,
    truth,
    visible_to_defender,
)
from .schemas import sensor_schemas
from .traffic import diurnal_factor, step_benign

__all__ = [
    "ACTION_COSTS_S",
    "ATTACKER_ADDRESS",
    "CNC_ADDRESS",
    "COMMANDS",
    "EXTERNAL_LOCATION",
    "PROBE_PORTS",
    "Action",
    "ActionOutcome",
    "Host",
    "Port",
    "Share",
    "TopologyConfig",
    "TruthItem",
    "World",
    "WorldError",
    "WorldTruth",
    "build_world",
    "diurnal_factor",
    "execute",
    "reachable",
    "sensor_schemas",
    "step_benign",
    "truth",
    "visible_to_defender",
]
