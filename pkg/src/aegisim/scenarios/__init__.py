from .killchain import PHASE_ORDER, KillChainTrace, killchain_attack
from .pipeline import DefensePipeline, DetectionResult, PipelineConfig, warmup_pipeline
from .poison import PoisonStep, full_attack_profile, poison_schedule
from .runner import (
    DEFENSE_MODES,
    RunReport,
    ScenarioConfig,
    ScenarioError,
    evaluate_detection,
    run_scenario,
    train_recon_agent,
)

__all__ = [
    "DEFENSE_MODES",
    "warmup_pipeline",
    "DefensePipeline",
    "DetectionResult",
    "KillChainTrace",
    "PHASE_ORDER",
    "PipelineConfig",
    "PoisonStep",
    "RunReport",
    "ScenarioConfig",
    "ScenarioError",
    "evaluate_detection",
    "full_attack_profile",
    "killchain_attack",
    "poison_schedule",
    "run_scenario",
    "train_recon_agent",
]
