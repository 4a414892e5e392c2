"""Mirror-symmetric fully connected autoencoder, trained with plain SGD.

The loss is a per-field sum: squared error on numeric and timestamp
segments, cross-entropy against a per-segment softmax on categorical
segments. Gradients are computed analytically; the test suite checks them
against central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..events import EncoderState


class DivergenceError(RuntimeError):
    def __init__(self, epoch: int):
        super().__init__(f"training diverged (non-finite loss) at epoch {epoch}")
        self.epoch = epoch


@dataclass(frozen=True)
class Hyperparams:
    hidden: tuple[int, ...] = (64, 16)
    learning_rate: float = 1e-2
    batch_size: int = 64
    max_epochs: int = 60
    patience: int = 5
    l2: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.patience < 1:
            raise ValueError("patience must be >= 1")


@dataclass(frozen=True)
class FieldSpec:
    name: str
    kind: str  # numeric | timestamp | categorical
    sl: slice


def field_specs(stats: EncoderState) -> tuple[FieldSpec, ...]:
    specs = []
    for name, kind in stats.schema.fields.items():
        if kind == "identifier":
            continue
        specs.append(FieldSpec(name=name, kind=kind, sl=stats.segments[name]))
    return tuple(specs)


class Network:
    """Weight container with batched forward/backward passes."""

    def __init__(self, widths: list[int], specs: tuple[FieldSpec, ...], seed: int):
        if widths[len(widths) // 2] >= widths[0]:
            raise ValueError("bottleneck must be narrower than the input")
        rng = np.random.default_rng(seed)
        self.widths = list(widths)
        self.specs = specs
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(widths[:-1], widths[1:]):
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def clone(self) -> "Network":
        other = object.__new__(Network)
        other.widths = list(self.widths)
        other.specs = self.specs
        other.weights = [w.copy() for w in self.weights]
        other.biases = [b.copy() for b in self.biases]
        return other

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Raw output layer (linear); categorical segments are logits."""
        a = x
        for i in range(self.n_layers - 1):
            a = np.tanh(a @ self.weights[i] + self.biases[i])
        return a @ self.weights[-1] + self.biases[-1]

    def bottleneck(self, x: np.ndarray) -> np.ndarray:
        a = x
        for i in range(len(self.widths) // 2):
            a = np.tanh(a @ self.weights[i] + self.biases[i])
        return a

    def reconstruct(self, x: np.ndarray) -> np.ndarray:
        """Forward pass with categorical logits turned into probabilities."""
        out = self.forward(x)
        for spec in self.specs:
            if spec.kind == "categorical":
                out[..., spec.sl] = _softmax(out[..., spec.sl])
        return out

    def field_errors(self, x: np.ndarray) -> np.ndarray:
        """(n, n_fields) raw reconstruction error per field.

        Numeric/timestamp: half sum of squared error over the segment.
        Categorical: cross-entropy of the true one-hot under the softmax.
        """
        x = np.atleast_2d(x)
        out = self.forward(x)
        errs = np.empty((x.shape[0], len(self.specs)))
        for j, spec in enumerate(self.specs):
            seg_out = out[:, spec.sl]
            seg_x = x[:, spec.sl]
            if spec.kind == "categorical":
                p = _softmax(seg_out)
                errs[:, j] = -np.sum(seg_x * np.log(p + 1e-300), axis=1)
            else:
                errs[:, j] = 0.5 * np.sum((seg_out - seg_x) ** 2, axis=1)
        return errs

    def loss_and_grad(self, x: np.ndarray, l2: float = 0.0):
        """Mean per-sample loss over the batch plus analytic parameter grads."""
        x = np.atleast_2d(x)
        n = x.shape[0]
        acts = [x]
        a = x
        for i in range(self.n_layers - 1):
            a = np.tanh(a @ self.weights[i] + self.biases[i])
            acts.append(a)
        out = a @ self.weights[-1] + self.biases[-1]

        delta = np.empty_like(out)
        loss = 0.0
        for spec in self.specs:
            seg_out = out[:, spec.sl]
            seg_x = x[:, spec.sl]
            if spec.kind == "categorical":
                p = _softmax(seg_out)
                loss += float(-np.sum(seg_x * np.log(p + 1e-300)))
                delta[:, spec.sl] = p - seg_x
            else:
                diff = seg_out - seg_x
                loss += float(0.5 * np.sum(diff**2))
                delta[:, spec.sl] = diff
        loss /= n
        delta /= n

        grads_w = [np.zeros_like(w) for w in self.weights]
        grads_b = [np.zeros_like(b) for b in self.biases]
        for i in range(self.n_layers - 1, -1, -1):
            grads_w[i] = acts[i].T @ delta
            grads_b[i] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights[i].T) * (1.0 - acts[i] ** 2)
        if l2 > 0.0:
            for i, w in enumerate(self.weights):
                loss += 0.5 * l2 * float(np.sum(w**2))
                grads_w[i] += l2 * w
        return loss, grads_w, grads_b

    def mean_loss(self, x: np.ndarray) -> float:
        return float(self.field_errors(x).sum(axis=1).mean())

    def flat_params(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.weights + self.biases])

    def set_flat_params(self, flat: np.ndarray) -> None:
        offset = 0
        for p in self.weights + self.biases:
            p[...] = flat[offset : offset + p.size].reshape(p.shape)
            offset += p.size


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


@dataclass
class TrainLog:
    stopped_epoch: int
    best_epoch: int
    best_val_loss: float
    train_losses: list[float] = field(default_factory=list)
    val_losses: list[float] = field(default_factory=list)


def sgd_fit(net: Network, train: np.ndarray, val: np.ndarray, hp: Hyperparams) -> TrainLog:
    """Minibatch SGD with early stopping; leaves ``net`` at the best-val weights."""
    rng = np.random.default_rng(hp.seed + 1)
    best = net.clone()
    best_val = net.mean_loss(val)
    best_epoch = 0
    log = TrainLog(stopped_epoch=0, best_epoch=0, best_val_loss=best_val)
    since_best = 0
    epoch = 0
    for epoch in range(1, hp.max_epochs + 1):
        order = rng.permutation(train.shape[0])
        epoch_loss = 0.0
        for start in range(0, train.shape[0], hp.batch_size):
            batch = train[order[start : start + hp.batch_size]]
            loss, gw, gb = net.loss_and_grad(batch, l2=hp.l2)
            if not np.isfinite(loss):
                raise DivergenceError(epoch)
            epoch_loss += loss * batch.shape[0]
            for i in range(net.n_layers):
                net.weights[i] -= hp.learning_rate * gw[i]
                net.biases[i] -= hp.learning_rate * gb[i]
        val_loss = net.mean_loss(val)
        if not np.isfinite(val_loss):
            raise DivergenceError(epoch)
        log.train_losses.append(epoch_loss / train.shape[0])
        log.val_losses.append(val_loss)
        if val_loss < best_val:
            best_val = val_loss
            best_epoch = epoch
            best = net.clone()
            since_best = 0
        else:
            since_best += 1
            if since_best >= hp.patience:
                break
    net.weights = best.weights
    net.biases = best.biases
    log.stopped_epoch = epoch
    log.best_epoch = best_epoch
    log.best_val_loss = best_val
    return log
