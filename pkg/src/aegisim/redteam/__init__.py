from .commands import (
    BLIND_PROBE_SLOTS,
    HTTP_PATHS,
    MAX_SHARE_SLOTS,
    PHASES,
    AgentKnowledge,
    CommandDictionary,
    CommandTemplate,
    HostKnowledge,
    default_dictionary,
    enumerate_actions,
    recon_dictionary,
)
from .env import ActionSlot, ReconEnv, RewardConfig, reward
from .knowledge import EpisodeTrace, Finding, coverage, efficiency, merge_findings, parse_outcome
from .policy import MLP, Policy, act, masked_softmax
from .train import TrainConfig, TrainingDiverged, evaluate, train

__all__ = [
    "ActionSlot",
    "AgentKnowledge",
    "BLIND_PROBE_SLOTS",
    "CommandDictionary",
    "CommandTemplate",
    "EpisodeTrace",
    "Finding",
    "HTTP_PATHS",
    "HostKnowledge",
    "MAX_SHARE_SLOTS",
    "MLP",
    "PHASES",
    "Policy",
    "ReconEnv",
    "RewardConfig",
    "TrainConfig",
    "TrainingDiverged",
    "act",
    "coverage",
    "default_dictionary",
    "efficiency",
    "enumerate_actions",
    "evaluate",
    "masked_softmax",
    "merge_findings",
    "parse_outcome",
    "recon_dictionary",
    "reward",
    "train",
]
