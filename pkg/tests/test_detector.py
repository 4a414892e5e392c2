"""Behaviour models: gradients, early stopping, calibration, updates."""

import dataclasses

import numpy as np
import pytest

from aegisim.detector import (
    DivergenceError,
    FieldSpec,
    Hyperparams,
    Network,
    fit,
    incremental_update,
    reconstruct,
    score_event,
    score_matrix,
    sgd_fit,
)
from aegisim.events import split_tag
from aegisim.lifegen import sensor_schemas

SPECS = (
    FieldSpec("num1", "numeric", slice(0, 1)),
    FieldSpec("cat1", "categorical", slice(1, 4)),
    FieldSpec("tsf", "timestamp", slice(4, 8)),
    FieldSpec("num2", "numeric", slice(8, 9)),
)
DIM = 9


def toy_batch(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, DIM))
    x[:, 1:4] = 0.0
    for i in range(n):
        x[i, 1 + rng.integers(0, 3)] = 1.0
    return x


def finite_difference_grad(net, x, l2, h=1e-6):
    flat = net.flat_params()
    out = np.zeros_like(flat)
    for k in range(len(flat)):
        up = flat.copy()
        up[k] += h
        net.set_flat_params(up)
        lp, _, _ = net.loss_and_grad(x, l2=l2)
        down = flat.copy()
        down[k] -= h
        net.set_flat_params(down)
        lm, _, _ = net.loss_and_grad(x, l2=l2)
        out[k] = (lp - lm) / (2 * h)
    net.set_flat_params(flat)
    return out


class TestGradients:
    @pytest.mark.parametrize("seed", range(10))
    def test_analytic_matches_central_differences(self, seed):
        rng = np.random.default_rng(seed)
        hidden = int(rng.integers(4, 9))
        bottleneck = int(rng.integers(2, 4))
        net = Network([DIM, hidden, bottleneck, hidden, DIM], SPECS, seed=seed)
        x = toy_batch(int(rng.integers(2, 6)), seed + 100)
        _, gw, gb = net.loss_and_grad(x, l2=1e-4)
        analytic = np.concatenate([g.ravel() for g in gw + gb])
        fd = finite_difference_grad(net, x, l2=1e-4)
        diff = np.abs(analytic - fd)
        denom = np.maximum(np.abs(analytic), np.abs(fd))
        # central differences carry ~1e-10 absolute cancellation noise at
        # double precision, so vanishing gradients get an absolute bound
        meaningful = denom > 1e-5
        assert (diff[meaningful] / denom[meaningful]).max() <= 1e-4
        if (~meaningful).any():
            assert diff[~meaningful].max() <= 1e-7


class TestFit:
    def test_constant_dataset_learns_to_near_zero(self):
        x = np.tile(toy_batch(1, 0), (64, 1))
        hp = Hyperparams(hidden=(6, 3), max_epochs=300, patience=30,
                         learning_rate=0.05, l2=0.0, seed=1)
        from aegisim.events import EncoderState, Schema

        stats = EncoderState(
            schema=Schema(fields={"num1": "numeric", "cat1": "categorical",
                                  "tsf": "timestamp", "num2": "numeric"},
                          vocabularies={"cat1": ("a", "b", "<OOV>")}),
            means={}, stds={}, vocabs={"cat1": ("a", "b", "<OOV>")},
            segments={s.name: s.sl for s in SPECS}, width=DIM,
        )
        model = fit(x, x[:8], stats, hp)
        assert model.log.best_val_loss < 0.05
        aggs, _, _ = score_matrix(model, x[:1])
        assert aggs[0] < 0.5

    def test_early_stop_within_patience_of_best(self):
        train = toy_batch(256, 2)
        val = toy_batch(64, 3)
        net = Network([DIM, 6, 3, 6, DIM], SPECS, seed=2)
        hp = Hyperparams(hidden=(6, 3), max_epochs=80, patience=4, learning_rate=0.02, seed=2)
        log = sgd_fit(net, train, val, hp)
        assert log.stopped_epoch - log.best_epoch <= hp.patience

    def test_early_stop_fires_on_worsening_val(self):
        """Train on noise A, validate on contradictory noise B: val loss
        stops improving early and training halts within patience."""
        train = toy_batch(128, 4)
        val = toy_batch(64, 5) * 3.0
        net = Network([DIM, 6, 3, 6, DIM], SPECS, seed=4)
        hp = Hyperparams(hidden=(6, 3), max_epochs=200, patience=3, learning_rate=0.05, seed=4)
        log = sgd_fit(net, train, val, hp)
        assert log.stopped_epoch < 200
        assert log.stopped_epoch <= log.best_epoch + hp.patience

    def test_determinism_fit_twice_identical(self):
        train = toy_batch(128, 6)
        val = toy_batch(32, 7)
        nets = []
        for _ in range(2):
            net = Network([DIM, 6, 3, 6, DIM], SPECS, seed=9)
            sgd_fit(net, train, val, Hyperparams(hidden=(6, 3), max_epochs=10, patience=3, seed=9))
            nets.append(net)
        for a, b in zip(nets[0].weights, nets[1].weights):
            np.testing.assert_array_equal(a, b)

    def test_divergence_reported_with_epoch(self):
        train = toy_batch(64, 8) * 100
        val = toy_batch(16, 9)
        net = Network([DIM, 6, 3, 6, DIM], SPECS, seed=8)
        with pytest.raises(DivergenceError) as err:
            np.seterr(over="ignore")
            try:
                sgd_fit(net, train, val, Hyperparams(hidden=(6, 3), max_epochs=50,
                                                     patience=50, learning_rate=1e5, seed=8))
            finally:
                np.seterr(over="warn")
        assert err.value.epoch >= 1

    def test_bottleneck_must_be_narrower(self):
        with pytest.raises(ValueError):
            Network([4, 8, 4, 8, 4], SPECS[:1], seed=0)


class TestReconstruct:
    def _model(self):
        x = np.tile(toy_batch(1, 10), (64, 1))
        from aegisim.events import EncoderState, Schema

        stats = EncoderState(
            schema=Schema(fields={"num1": "numeric", "cat1": "categorical",
                                  "tsf": "timestamp", "num2": "numeric"},
                          vocabularies={"cat1": ("a", "b", "<OOV>")}),
            means={}, stds={}, vocabs={"cat1": ("a", "b", "<OOV>")},
            segments={s.name: s.sl for s in SPECS}, width=DIM,
        )
        hp = Hyperparams(hidden=(6, 3), max_epochs=200, patience=30, learning_rate=0.05, l2=0.0, seed=3)
        return fit(x, x[:8], stats, hp), x

    def test_constant_data_errors_near_zero(self):
        model, x = self._model()
        _, errs = reconstruct(model, x[0])
        assert all(v < 0.05 for v in errs.values())

    def test_purity(self):
        model, x = self._model()
        r1, e1 = reconstruct(model, x[0])
        r2, e2 = reconstruct(model, x[0])
        np.testing.assert_array_equal(r1, r2)
        assert e1 == e2

    def test_per_field_errors_sum_to_total_loss(self):
        model, x = self._model()
        sample = toy_batch(1, 11)
        _, errs = reconstruct(model, sample[0])
        total, _, _ = model.net.loss_and_grad(sample, l2=0.0)
        assert sum(errs.values()) == pytest.approx(total, rel=1e-9)

    def test_width_mismatch(self):
        model, _ = self._model()
        with pytest.raises(ValueError):
            reconstruct(model, np.zeros(DIM + 1))


class TestScoring:
    def test_benign_aggregates_uniform(self, held_out_scored):
        scored, _ = held_out_scored
        aggs = np.sort(np.array([s.score.aggregate for s in scored])[:1000])
        n = len(aggs)
        ks = max(np.max(np.arange(1, n + 1) / n - aggs), np.max(aggs - np.arange(0, n) / n))
        assert ks < 1.628 / np.sqrt(n)  # alpha = 0.01
        assert abs(np.median(aggs) - 0.5) < 0.05

    def test_attribution_of_corrupted_field(self, benign_corpus, fitted_bank):
        world, events = benign_corpus
        bank, _ = fitted_bank
        schemas = sensor_schemas()
        prepared = bank.prepare([e for e in events if split_tag(e.id, 0) == "test"])
        os_events = [e for e in prepared if e.source == "os"][:500]
        model = bank.models["os"]
        rng = np.random.default_rng(5)
        hits = 0
        for e in os_events:
            which = str(rng.choice(["bytes", "cpu", "duration_ms", "resource", "action"]))
            if which == "resource":
                bad = dataclasses.replace(e, resource="/opt/implant/weird.bin")
            elif which == "action":
                bad = dataclasses.replace(e, action="injectcode")
            else:
                bad = dataclasses.replace(e, metrics={**e.metrics, which: 1e7})
            sc = score_event(model, bad, schemas["os"])
            hits += sc.attributed_field == which
        assert hits / len(os_events) >= 0.90

    def test_score_deterministic(self, benign_corpus, fitted_bank):
        world, events = benign_corpus
        bank, _ = fitted_bank
        schemas = sensor_schemas()
        e = bank.prepare(events[:50])[0]
        model = bank.models[e.source]
        s1 = score_event(model, e, schemas[e.source])
        s2 = score_event(model, e, schemas[e.source])
        assert s1 == s2

    def test_aggregate_is_calibrated_max(self, fitted_bank):
        """The aggregate is a monotone recalibration of the per-field max:
        ranking by aggregate equals ranking by max per-field score."""
        bank, val_sets = fitted_bank
        model = bank.models["os"]
        aggs, per_field, _ = score_matrix(model, val_sets["os"][:500])
        maxes = per_field.max(axis=1)
        order = np.argsort(maxes, kind="stable")
        assert (np.diff(aggs[order]) >= 0).all()
        # equal maxes map to equal aggregates (it is a function of the max)
        for i in range(len(order) - 1):
            if maxes[order[i]] == maxes[order[i + 1]]:
                assert aggs[order[i]] == aggs[order[i + 1]]

    def test_monotone_scoring_in_field_error(self, fitted_bank):
        bank, val_sets = fitted_bank
        model = bank.models["os"]
        table = model.quantile_tables[model.specs[0].name]
        errors = np.linspace(0, table.max() * 1.5, 200)
        ranks = np.searchsorted(table, errors, side="left") / len(table)
        assert (np.diff(ranks) >= 0).all()

    def test_batch_and_single_paths_agree(self, benign_corpus, fitted_bank):
        world, events = benign_corpus
        bank, _ = fitted_bank
        schemas = sensor_schemas()
        sample = bank.prepare([e for e in events if e.source == "network"][:40])
        scored, _ = bank.score_stream(sample)
        model = bank.models["network"]
        for s in scored[:10]:
            single = score_event(model, s.event, schemas["network"])
            assert single.aggregate == pytest.approx(s.score.aggregate, abs=1e-12)
            assert single.attributed_field == s.score.attributed_field


class TestIncrementalUpdate:
    def _setup(self, fitted_bank):
        bank, val_sets = fitted_bank
        return bank.models["network"].copy(), val_sets["network"]

    def test_self_distillation_neutral(self, fitted_bank):
        model, val = self._setup(fitted_bank)
        res = incremental_update(model, val[:200], val[200:400], 0.5, val, steps=30, seed=1)
        assert not res.rolled_back
        assert abs(res.val_loss_after - res.val_loss_before) / res.val_loss_before < 0.05

    def test_rollback_on_degradation(self, fitted_bank):
        model, val = self._setup(fitted_bank)
        hostile = np.ones((200, model.input_width)) * 8.0
        res = incremental_update(model, hostile, np.empty((0, model.input_width)), 0.0, val,
                                 steps=400, seed=2)
        assert res.rolled_back
        assert res.val_loss_after > res.val_loss_before * 1.10
        # model unchanged on rollback
        for a, b in zip(res.model.net.weights, model.net.weights):
            np.testing.assert_array_equal(a, b)

    def test_drift_adaptation_two_worlds(self, benign_corpus):
        """Two-world comparison: updating on drifted-but-benign traffic must
        lower the drifted events' scores versus the pre-update model."""
        from aegisim.detector import fit_bank
        from aegisim.events import encode_batch
        from aegisim.lifegen import TopologyConfig, build_world, step_benign

        world, events = benign_corpus
        hp = Hyperparams(hidden=(32, 8), max_epochs=8, patience=3,
                         learning_rate=5e-3, batch_size=128, seed=2)
        bank, val_sets = fit_bank(events, sensor_schemas(), hp)
        model = bank.models["network"]
        # drifted world: same topology, different behavioural profiles
        drifted = build_world(TopologyConfig(seed=777))
        drifted_events = bank.prepare(
            [e for e in step_benign(drifted, 6) if e.source == "network"]
        )
        x = encode_batch(drifted_events, bank.schemas["network"], model.stats)
        before, _, _ = score_matrix(model, x)
        res = incremental_update(model, x, val_sets["network"], 0.3, val_sets["network"],
                                 steps=150, seed=3, max_degradation=1.5)
        assert not res.rolled_back
        after, _, _ = score_matrix(res.model, x)
        assert after.mean() < before.mean()

    def test_replay_ratio_validated(self, fitted_bank):
        model, val = self._setup(fitted_bank)
        with pytest.raises(ValueError):
            incremental_update(model, val[:10], val[:10], 1.5, val)
