"""Shared fixtures. The expensive ones (fitted detector bank, trained
policy) are session-scoped and reused across test modules."""

import pytest

from aegisim.detector import Hyperparams, fit_bank
from aegisim.events import split_tag
from aegisim.lifegen import TopologyConfig, build_world, sensor_schemas, step_benign

SMALL_ZONES = {1: 2, 2: 1, 3: 3, 4: 1, 5: 1, 6: 1}


@pytest.fixture(scope="session")
def small_world():
    return build_world(TopologyConfig(zone_sizes=dict(SMALL_ZONES), seed=11))


@pytest.fixture(scope="session")
def benign_corpus():
    """~42k benign events from the default theatre."""
    world = build_world(TopologyConfig(seed=11))
    return world, step_benign(world, 30)


@pytest.fixture(scope="session")
def fitted_bank(benign_corpus):
    world, events = benign_corpus
    hp = Hyperparams(hidden=(48, 12), max_epochs=12, patience=3,
                     learning_rate=5e-3, batch_size=128, seed=1)
    bank, val_sets = fit_bank(events, sensor_schemas(), hp)
    return bank, val_sets


@pytest.fixture(scope="session")
def held_out_scored(benign_corpus, fitted_bank):
    world, events = benign_corpus
    bank, _ = fitted_bank
    test_events = bank.prepare([e for e in events if split_tag(e.id, 0) == "test"])
    scored, emb = bank.score_stream(test_events)
    return scored, emb


@pytest.fixture(scope="session")
def trained_policy(small_world):
    from aegisim.redteam import ReconEnv, RewardConfig, TrainConfig, recon_dictionary, train

    world = small_world

    def env_factory(i):
        return ReconEnv(world.copy(), recon_dictionary(), RewardConfig(),
                        actor="PC01/rat", episode_len=60)

    return train(env_factory, TrainConfig(episodes=240, n_replicas=4, episode_len=60, seed=5))
