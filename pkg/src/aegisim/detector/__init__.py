from .autoencoder import DivergenceError, FieldSpec, Hyperparams, Network, TrainLog, field_specs, sgd_fit
from .bank import DetectorBank, ScoredEvent, fit_bank
from .scoring import (
    MODEL_SCHEMA_VERSION,
    BehaviourModel,
    IncongruityScore,
    calibrate,
    embeddings,
    fit,
    reconstruct,
    score_event,
    score_matrix,
)
from .update import UpdateResult, incremental_update

__all__ = [
    "MODEL_SCHEMA_VERSION",
    "BehaviourModel",
    "DetectorBank",
    "DivergenceError",
    "FieldSpec",
    "Hyperparams",
    "IncongruityScore",
    "Network",
    "ScoredEvent",
    "TrainLog",
    "UpdateResult",
    "calibrate",
    "embeddings",
    "field_specs",
    "fit",
    "fit_bank",
    "incremental_update",
    "reconstruct",
    "score_event",
    "score_matrix",
    "sgd_fit",
]
