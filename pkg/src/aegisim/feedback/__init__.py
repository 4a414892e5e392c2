from .batches import DEFAULT_RATIOS, GuardResult, assemble_batch, poisoning_guard
from .memory import EpisodicMemory, reservoir_insert
from .signature import GraphSignature, signature, similarity
from .stores import (
    DEFAULT_REINTRODUCE_AFTER,
    DEFAULT_SIGMA,
    VERDICTS,
    AnnotationError,
    BaseEntry,
    FeedbackStores,
    FilterOutcome,
    RoutingOutcome,
    SignatureBase,
    Verdict,
    filter_known,
)

__all__ = [
    "DEFAULT_RATIOS",
    "DEFAULT_REINTRODUCE_AFTER",
    "DEFAULT_SIGMA",
    "VERDICTS",
    "AnnotationError",
    "BaseEntry",
    "EpisodicMemory",
    "FeedbackStores",
    "FilterOutcome",
    "GraphSignature",
    "GuardResult",
    "RoutingOutcome",
    "SignatureBase",
    "Verdict",
    "assemble_batch",
    "filter_known",
    "poisoning_guard",
    "reservoir_insert",
    "signature",
    "similarity",
]
