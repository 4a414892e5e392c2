"""Advantage actor-critic training over parallel environment replicas.

Replicas roll out full episodes from the shared root policy on private
World copies; their batched gradients are applied to the root serially in a
fixed order, which keeps training reproducible while preserving the
horizontal-scaling structure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .policy import Policy, act


@dataclass(frozen=True)
class TrainConfig:
    episodes: int = 600
    n_replicas: int = 4
    episode_len: int = 100
    gamma: float = 0.99
    learning_rate: float = 1e-2
    entropy_bonus: float = 0.02
    eps: float = 0.05
    hidden: int = 64
    seed: int = 0


class TrainingDiverged(RuntimeError):
    def __init__(self, episode: int):
        super().__init__(f"training diverged at episode {episode}")
        self.episode = episode


def _rollout(env, policy: Policy, eps: float, rng: np.random.Generator):
    states, actions, rewards, masks = [], [], [], []
    s = env.reset()
    done = False
    while not done:
        mask = env.valid_mask()
        a = act(policy, s, eps, mask, rng)
        states.append(s)
        actions.append(a)
        masks.append(mask)
        s, r, done, _ = env.step(a)
        rewards.append(r)
    return np.array(states), np.array(actions), np.array(rewards), np.array(masks)


def _returns(rewards: np.ndarray, gamma: float) -> np.ndarray:
    out = np.empty_like(rewards)
    acc = 0.0
    for i in range(len(rewards) - 1, -1, -1):
        acc = rewards[i] + gamma * acc
        out[i] = acc
    return out


def _update(policy: Policy, states, actions, returns, masks, cfg: TrainConfig) -> float:
    n = len(states)
    values, h_v = policy.critic.forward(states)
    values = values[:, 0]
    adv = returns - values

    logits, h_a = policy.actor.forward(states)
    z = np.where(masks, logits, -np.inf)
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z, where=np.isfinite(z), out=np.zeros_like(z))
    p = e / e.sum(axis=1, keepdims=True)

    onehot = np.zeros_like(p)
    onehot[np.arange(n), actions] = 1.0
    dlogits = (p - onehot) * adv[:, None] / n
    # entropy bonus: push probability mass toward uniform over valid actions
    logp = np.log(p, where=p > 0, out=np.full_like(p, 0.0))
    ent = -(p * logp).sum(axis=1, keepdims=True)
    dlogits += cfg.entropy_bonus * p * (logp + ent) / n
    dlogits[~masks] = 0.0

    actor_grads = policy.actor.backward(states, h_a, dlogits)
    dvalue = ((values - returns) / n)[:, None]
    critic_grads = policy.critic.backward(states, h_v, dvalue)
    policy.actor.step(actor_grads, cfg.learning_rate)
    policy.critic.step(critic_grads, cfg.learning_rate)

    pol_loss = float(-(np.log(p[np.arange(n), actions] + 1e-300) * adv).mean())
    return pol_loss


def train(env_factory, cfg: TrainConfig, rc=None) -> Policy:
    """Train a root policy; ``env_factory(replica_index)`` must yield an
    environment over a private World copy."""
    envs = [env_factory(i) for i in range(cfg.n_replicas)]
    probe = envs[0]
    policy = Policy.fresh(probe.state_dim, probe.n_actions, hidden=cfg.hidden, seed=cfg.seed)
    rngs = [np.random.default_rng(cfg.seed * 10_007 + i) for i in range(cfg.n_replicas)]
    rounds = max(1, cfg.episodes // cfg.n_replicas)
    episode = 0
    for _ in range(rounds):
        batches = []
        for i, env in enumerate(envs):
            episode += 1
            states, actions, rewards, masks = _rollout(env, policy, cfg.eps, rngs[i])
            if not np.isfinite(rewards).all():
                raise TrainingDiverged(episode)
            batches.append((states, actions, _returns(rewards, cfg.gamma), masks))
        for states, actions, rets, masks in batches:
            loss = _update(policy, states, actions, rets, masks, cfg)
            if not np.isfinite(loss):
                raise TrainingDiverged(episode)
    policy.episodes_trained = episode
    return policy


def evaluate(env, policy: Policy | None, episodes: int, seed: int = 0, eps: float = 0.0) -> float:
    """Mean episode score; a None policy is the uniform-random baseline."""
    rng = np.random.default_rng(seed)
    scores = []
    for _ in range(episodes):
        s = env.reset()
        done = False
        total = 0.0
        while not done:
            mask = env.valid_mask()
            if policy is None:
                a = int(rng.choice(np.flatnonzero(mask)))
            else:
                a = act(policy, s, eps, mask, rng)
            s, r, done, _ = env.step(a)
            total += r
        scores.append(total)
    return float(np.mean(scores))
