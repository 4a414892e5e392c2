"""Actor-critic policy: small tanh MLPs with hand-rolled gradients."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class MLP:
    """One hidden tanh layer; linear output."""

    def __init__(self, n_in: int, n_hidden: int, n_out: int, seed: int):
        rng = np.random.default_rng(seed)
        b1 = np.sqrt(6.0 / (n_in + n_hidden))
        b2 = np.sqrt(6.0 / (n_hidden + n_out))
        self.w1 = rng.uniform(-b1, b1, size=(n_in, n_hidden))
        self.b1 = np.zeros(n_hidden)
        self.w2 = rng.uniform(-b2, b2, size=(n_hidden, n_out))
        self.b2 = np.zeros(n_out)

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        h = np.tanh(x @ self.w1 + self.b1)
        return h @ self.w2 + self.b2, h

    def backward(self, x: np.ndarray, h: np.ndarray, dout: np.ndarray):
        dw2 = h.T @ dout
        db2 = dout.sum(axis=0)
        dh = (dout @ self.w2.T) * (1.0 - h**2)
        dw1 = x.T @ dh
        db1 = dh.sum(axis=0)
        return dw1, db1, dw2, db2

    def step(self, grads, lr: float) -> None:
        dw1, db1, dw2, db2 = grads
        self.w1 -= lr * dw1
        self.b1 -= lr * db1
        self.w2 -= lr * dw2
        self.b2 -= lr * db2

    def params(self) -> list[np.ndarray]:
        return [self.w1, self.b1, self.w2, self.b2]


@dataclass
class Policy:
    """Actor (state -> masked action logits) and critic (state -> value)."""

    actor: MLP
    critic: MLP
    n_actions: int
    episodes_trained: int = 0
    seed: int = 0
    meta: dict = field(default_factory=dict)

    @classmethod
    def fresh(cls, state_dim: int, n_actions: int, hidden: int = 64, seed: int = 0) -> "Policy":
        return cls(
            actor=MLP(state_dim, hidden, n_actions, seed=seed),
            critic=MLP(state_dim, hidden, 1, seed=seed + 1),
            n_actions=n_actions,
            seed=seed,
        )

    def distribution(self, state: np.ndarray, mask: np.ndarray) -> np.ndarray:
        """Softmax over valid-action logits; invalid actions get probability 0."""
        logits, _ = self.actor.forward(state.reshape(1, -1))
        return masked_softmax(logits[0], mask)

    def value(self, state: np.ndarray) -> float:
        out, _ = self.critic.forward(state.reshape(1, -1))
        return float(out[0, 0])


def masked_softmax(logits: np.ndarray, mask: np.ndarray) -> np.ndarray:
    z = np.where(mask, logits, -np.inf)
    z = z - z.max()
    e = np.exp(z, where=np.isfinite(z), out=np.zeros_like(z))
    total = e.sum()
    if total <= 0.0:
        raise ValueError("no valid actions")
    return e / total


def act(policy: Policy, state: np.ndarray, eps: float, mask: np.ndarray,
        rng: np.random.Generator) -> int:
    """Exploration-mixed action choice.

    With probability 1-eps, sample the masked softmax; with probability eps,
    pick uniformly among the valid non-argmax actions (forced exploration).
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    p = policy.distribution(state, mask)
    if eps > 0.0 and rng.random() < eps:
        best = int(np.argmax(p))
        candidates = np.flatnonzero(mask)
        candidates = candidates[candidates != best]
        if len(candidates):
            return int(rng.choice(candidates))
    return int(rng.choice(policy.n_actions, p=p))
