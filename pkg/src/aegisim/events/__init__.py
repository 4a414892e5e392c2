from .model import (
    CANONICAL_KEYS,
    MANDATORY_FIELDS,
    OOV,
    SOURCES,
    Event,
    EventError,
    Hint,
    Schema,
    canonicalize,
    parse_event,
    read_events,
    serialize_event,
    write_events,
)
from .encoding import EncoderState, FeatureVector, encode, encode_batch, fit_encoder
from .split import split_tag

__all__ = [
    "CANONICAL_KEYS",
    "MANDATORY_FIELDS",
    "OOV",
    "SOURCES",
    "EncoderState",
    "Event",
    "EventError",
    "FeatureVector",
    "Hint",
    "Schema",
    "canonicalize",
    "encode",
    "encode_batch",
    "fit_encoder",
    "parse_event",
    "read_events",
    "serialize_event",
    "split_tag",
    "write_events",
]
