"""Incremental model updates with episodic replay and a rollback guard."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scoring import BehaviourModel, calibrate


@dataclass(frozen=True)
class UpdateResult:
    model: BehaviourModel
    rolled_back: bool
    val_loss_before: float
    val_loss_after: float


def incremental_update(
    model: BehaviourModel,
    fresh: np.ndarray,
    memory: np.ndarray,
    replay_ratio: float,
    val: np.ndarray,
    *,
    steps: int = 40,
    batch_size: int = 64,
    max_degradation: float = 1.10,
    seed: int = 0,
) -> UpdateResult:
    """Bounded SGD on batches mixing fresh and replayed memory samples.

    Batches draw (1-replay_ratio):replay_ratio from fresh:memory. If the
    held-out validation loss degrades by more than ``max_degradation``, the
    update is rolled back and the original model returned unchanged; the
    rollback is an outcome, not an error. An accepted update re-calibrates
    the quantile tables on ``val``.
    """
    if not 0.0 <= replay_ratio <= 1.0:
        raise ValueError("replay_ratio must lie in [0, 1]")
    if fresh.size == 0 and memory.size == 0:
        raise ValueError("nothing to train on")
    rng = np.random.default_rng(seed)
    before = model.net.mean_loss(val)
    candidate = model.net.clone()
    hp = model.hp
    n_mem = int(round(batch_size * replay_ratio))
    if memory.size == 0:
        n_mem = 0
    n_fresh = batch_size - n_mem
    if fresh.size == 0:
        n_fresh, n_mem = 0, batch_size
    for _ in range(steps):
        parts = []
        if n_fresh:
            parts.append(fresh[rng.integers(0, fresh.shape[0], size=n_fresh)])
        if n_mem:
            parts.append(memory[rng.integers(0, memory.shape[0], size=n_mem)])
        batch = np.concatenate(parts, axis=0)
        _, gw, gb = candidate.loss_and_grad(batch, l2=hp.l2)
        for i in range(candidate.n_layers):
            candidate.weights[i] -= hp.learning_rate * gw[i]
            candidate.biases[i] -= hp.learning_rate * gb[i]
    after = candidate.mean_loss(val)
    if not np.isfinite(after) or after > before * max_degradation:
        return UpdateResult(model=model, rolled_back=True, val_loss_before=before, val_loss_after=after)
    updated = calibrate(candidate, val, model.stats, hp, model.log)
    return UpdateResult(model=updated, rolled_back=False, val_loss_before=before, val_loss_after=after)
