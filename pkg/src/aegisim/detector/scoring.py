"""Behaviour model: trained network plus calibrated incongruity scoring.

Per-field scores are empirical quantile ranks of the raw reconstruction
error against that field's validation error table, making scores comparable
across field types. The aggregate keeps the max-over-fields aggregation but
is itself rank-calibrated against the validation distribution of that max,
so benign aggregates are uniform on [0,1] and thresholds carry a direct
false-positive-rate meaning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..events import EncoderState, Event, Schema, encode_batch
from .autoencoder import FieldSpec, Hyperparams, Network, TrainLog, field_specs, sgd_fit

MODEL_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class IncongruityScore:
    aggregate: float
    per_field: dict[str, float]
    attributed: str | None = None

    @property
    def attributed_field(self) -> str | None:
        if self.attributed is not None:
            return self.attributed
        if not self.per_field:
            return None
        return max(self.per_field, key=lambda k: (self.per_field[k], k))


@dataclass
class BehaviourModel:
    net: Network
    stats: EncoderState
    specs: tuple[FieldSpec, ...]
    quantile_tables: dict[str, np.ndarray]  # per-field sorted val errors
    aggregate_table: np.ndarray  # sorted val max-of-field-scores
    hp: Hyperparams
    log: TrainLog
    schema_version: int = MODEL_SCHEMA_VERSION

    @property
    def input_width(self) -> int:
        return self.net.widths[0]

    def copy(self) -> "BehaviourModel":
        return BehaviourModel(
            net=self.net.clone(),
            stats=self.stats,
            specs=self.specs,
            quantile_tables={k: v.copy() for k, v in self.quantile_tables.items()},
            aggregate_table=self.aggregate_table.copy(),
            hp=self.hp,
            log=self.log,
            schema_version=self.schema_version,
        )


def _rank(table: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Quantile rank in [0,1]: fraction of table entries strictly below.

    An error above everything seen in validation ranks exactly 1.0; tied
    values take the rank of the tie block's start, so a constant dataset
    scores 0 rather than drifting to the middle.
    """
    return np.searchsorted(table, values, side="left") / len(table)


def calibrate(net: Network, val: np.ndarray, stats: EncoderState, hp: Hyperparams,
              log: TrainLog) -> BehaviourModel:
    """Build the quantile tables from validation reconstruction errors."""
    specs = field_specs(stats)
    errs = net.field_errors(val)
    tables = {spec.name: np.sort(errs[:, j]) for j, spec in enumerate(specs)}
    per_field = np.column_stack(
        [_rank(tables[spec.name], errs[:, j]) for j, spec in enumerate(specs)]
    )
    aggregate_table = np.sort(per_field.max(axis=1))
    return BehaviourModel(
        net=net, stats=stats, specs=specs, quantile_tables=tables,
        aggregate_table=aggregate_table, hp=hp, log=log,
    )


def fit(train: np.ndarray, val: np.ndarray, stats: EncoderState, hp: Hyperparams) -> BehaviourModel:
    """Train with early stopping and calibrate; deterministic under a fixed seed."""
    if train.size == 0 or val.size == 0:
        raise ValueError("train and validation sets must be non-empty")
    specs = field_specs(stats)
    widths = [train.shape[1], *hp.hidden, *reversed(hp.hidden[:-1]), train.shape[1]]
    net = Network(widths, specs, seed=hp.seed)
    log = sgd_fit(net, train, val, hp)
    return calibrate(net, val, stats, hp, log)


def reconstruct(model: BehaviourModel, x: np.ndarray) -> tuple[np.ndarray, dict[str, float]]:
    """Deterministic forward pass plus raw per-field errors for one vector."""
    if x.shape[-1] != model.input_width:
        raise ValueError(f"input width {x.shape[-1]} != model width {model.input_width}")
    recon = model.net.reconstruct(np.atleast_2d(x))[0]
    errs = model.net.field_errors(x)[0]
    return recon, {spec.name: float(errs[j]) for j, spec in enumerate(model.specs)}


def score_matrix(
    model: BehaviourModel, x: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(aggregates, per-field scores, attributed column index) for a batch.

    Attribution is the argmax of the per-field scores; saturated ties (several
    fields ranking 1.0) are broken by how far each raw error overshoots its
    validation table, which points at the field actually responsible.
    """
    x = np.atleast_2d(x)
    if x.shape[1] != model.input_width:
        raise ValueError(f"input width {x.shape[1]} != model width {model.input_width}")
    errs = model.net.field_errors(x)
    per_field = np.empty_like(errs)
    excess = np.empty_like(errs)
    for j, spec in enumerate(model.specs):
        table = model.quantile_tables[spec.name]
        per_field[:, j] = _rank(table, errs[:, j])
        excess[:, j] = errs[:, j] / (table[-1] + 1e-12)
    row_max = per_field.max(axis=1, keepdims=True)
    aggregates = _rank(model.aggregate_table, row_max[:, 0])
    tied_excess = np.where(per_field == row_max, excess, -np.inf)
    attributed = np.argmax(tied_excess, axis=1)
    return aggregates, per_field, attributed


def embeddings(model: BehaviourModel, x: np.ndarray) -> np.ndarray:
    """Bottleneck embedding rows for a batch (used by the correlator)."""
    return model.net.bottleneck(np.atleast_2d(x))


def score_event(model: BehaviourModel, e: Event, schema: Schema) -> IncongruityScore:
    x = encode_batch([e], schema, model.stats)
    aggregates, per_field, attributed = score_matrix(model, x)
    fields = {spec.name: float(per_field[0, j]) for j, spec in enumerate(model.specs)}
    return IncongruityScore(
        aggregate=float(aggregates[0]),
        per_field=fields,
        attributed=model.specs[int(attributed[0])].name,
    )
