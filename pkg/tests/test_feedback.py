"""Active-learning layer: signatures, bases, memory, guard, batches."""

import logging
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aegisim.correlator import AlertGraph, Edge
from aegisim.detector import IncongruityScore
from aegisim.detector.bank import ScoredEvent
from aegisim.events import Event
from aegisim.feedback import (
    AnnotationError,
    EpisodicMemory,
    FeedbackStores,
    GraphSignature,
    Verdict,
    assemble_batch,
    filter_known,
    poisoning_guard,
    reservoir_insert,
    signature,
    similarity,
)
from tests.test_correlator import group_for


def alert_from_pairs(pairs, alert_id="a1", fields=("bytes",)):
    """pairs: list of (src entity, action, dst entity)."""
    groups, edges = [], []
    nodes = {}
    for i, (src, action, dst) in enumerate(pairs):
        g = group_for(i, i, src, dst, action=action, agg=0.9)
        g.per_field_max = {f: 0.9 for f in fields}
        groups.append(g)
        edges.append(Edge(src=f"{src[0]}:{src[1]}@v1", dst=f"{dst[0]}:{dst[1]}@v1",
                          action=action, ts=i, group_index=i, incongruity=0.9, rarity=0.9))
        nodes[f"{src[0]}:{src[1]}@v1"] = 0.95
        nodes[f"{dst[0]}:{dst[1]}@v1"] = 0.95
    return AlertGraph(alert_id=alert_id, tau=0.9, node_threats=nodes,
                      node_labels={k: k for k in nodes}, edges=edges, groups=groups,
                      created_ts=0)


PAIRS = [
    (("address", "atk"), "probe", ("host", "web")),
    (("address", "atk"), "probe", ("host", "files")),
    (("process", "pc/rat"), "upload", ("address", "cnc")),
]


class TestSignature:
    def test_deterministic(self):
        a = alert_from_pairs(PAIRS)
        assert signature(a) == signature(a)

    def test_label_independence(self):
        a = alert_from_pairs(PAIRS)
        relabelled = [
            (("address", "evil"), "probe", ("host", "w2")),
            (("address", "evil"), "probe", ("host", "f2")),
            (("process", "pc9/rat"), "upload", ("address", "c2")),
        ]
        b = alert_from_pairs(relabelled, alert_id="a2")
        assert signature(a) == signature(b)
        assert similarity(signature(a), signature(b)) == 1.0

    def test_extra_edge_changes_triples(self):
        a = alert_from_pairs(PAIRS)
        b = alert_from_pairs(PAIRS + [(("process", "pc/rat"), "delete", ("file", "pc:/l"))],
                             alert_id="a2")
        assert signature(a).triples != signature(b).triples


class TestSimilarity:
    def test_identical_is_one(self):
        s = signature(alert_from_pairs(PAIRS))
        assert similarity(s, s) == 1.0

    def test_disjoint_is_zero(self):
        a = signature(alert_from_pairs(PAIRS, fields=("bytes",)))
        b = signature(alert_from_pairs(
            [(("host", "h"), "connect", ("host", "g"))], alert_id="a2", fields=("cpu",)))
        assert similarity(a, b) == 0.0

    def test_half_triples_all_fields_hand_value(self):
        # multiset Jaccard of half-overlap = 1/3; fields identical
        # 0.7 * (1/3) + 0.3 * 1 = 0.5333...
        x = GraphSignature(triples=((("a", "x", "b"), 1), (("a", "y", "b"), 1)),
                           fields=frozenset({"f"}), node_bucket=4)
        y = GraphSignature(triples=((("a", "x", "b"), 1), (("a", "z", "b"), 1)),
                           fields=frozenset({"f"}), node_bucket=4)
        assert similarity(x, y) == pytest.approx(0.7 * (1 / 3) + 0.3)

    def test_symmetric(self):
        a = signature(alert_from_pairs(PAIRS))
        b = signature(alert_from_pairs(PAIRS[:2], alert_id="a2"))
        assert similarity(a, b) == similarity(b, a)


class TestFilterKnown:
    def test_empty_base_passes(self):
        stores = FeedbackStores()
        out = filter_known(alert_from_pairs(PAIRS), stores.fp_base)
        assert not out.suppressed

    def test_identical_fp_suppressed_with_id(self):
        stores = FeedbackStores()
        first = alert_from_pairs(PAIRS, alert_id="a1")
        stores.annotate(first, Verdict("false_positive"))
        again = alert_from_pairs(PAIRS, alert_id="a2")
        out = filter_known(again, stores.fp_base)
        assert out.suppressed
        assert out.matched_id == "a1"
        assert out.matched_similarity == 1.0

    def test_similarity_below_sigma_passes(self):
        stores = FeedbackStores()
        stores.annotate(alert_from_pairs(PAIRS, alert_id="a1"), Verdict("false_positive"))
        other = alert_from_pairs(
            [(("host", "h"), "connect", ("host", "g")),
             (("address", "atk"), "probe", ("host", "web"))],
            alert_id="a2", fields=("cpu",))
        out = filter_known(other, stores.fp_base, sigma=0.8)
        assert not out.suppressed
        assert out.matched_similarity < 0.8


class TestAnnotate:
    def test_fp_routing(self):
        stores = FeedbackStores()
        out = stores.annotate(alert_from_pairs(PAIRS), Verdict("false_positive", "noise"))
        assert out.fp_base_size == 1
        assert not out.soc_queued
        assert stores.soc_queue == []

    def test_tp_routing(self):
        stores = FeedbackStores()
        out = stores.annotate(alert_from_pairs(PAIRS), Verdict("true_positive"))
        assert out.soc_queued
        assert stores.soc_queue == ["a1"]
        assert out.fp_base_size == 0

    def test_authorized_routing(self):
        stores = FeedbackStores()
        out = stores.annotate(alert_from_pairs(PAIRS), Verdict("authorized_anomaly"))
        assert out.authorized_base_size == 1
        assert stores.soc_queue == []

    def test_double_annotation_rejected(self):
        stores = FeedbackStores()
        stores.annotate(alert_from_pairs(PAIRS), Verdict("true_positive"))
        with pytest.raises(AnnotationError):
            stores.annotate(alert_from_pairs(PAIRS), Verdict("false_positive"))

    def test_unknown_verdict_rejected(self):
        with pytest.raises(AnnotationError):
            Verdict("maybe")

    def test_reintroduction_after_threshold(self):
        stores = FeedbackStores()
        out = []
        for i in range(3):
            out.append(stores.annotate(alert_from_pairs(PAIRS, alert_id=f"a{i}"),
                                       Verdict("false_positive")))
        assert out[0].reintroduction_candidates == ()
        assert out[1].reintroduction_candidates == ()
        assert len(out[2].reintroduction_candidates) == 9  # 3 alerts x 3 members


def mk_event(i):
    return Event(id=f"m{i}", ts=i, actor="A", action="x", location="L",
                 resource=None, source="os", metrics={})


class TestReservoir:
    def test_fill_phase_keeps_everything(self):
        mem = EpisodicMemory(capacity=10, seed=1)
        for i in range(10):
            reservoir_insert(mem, mk_event(i), 0.1, ceiling=0.9)
        assert len(mem.events) == 10
        assert {e.id for e in mem.events} == {f"m{i}" for i in range(10)}

    def test_ceiling_guard_rejects(self):
        mem = EpisodicMemory(capacity=10, seed=1)
        reservoir_insert(mem, mk_event(0), 0.95, ceiling=0.9)
        assert mem.events == []
        assert mem.rejected == 1

    def test_bounded_capacity(self):
        mem = EpisodicMemory(capacity=5, seed=2)
        for i in range(100):
            mem.insert(mk_event(i), 0.1, ceiling=0.9)
        assert len(mem.events) == 5
        assert mem.admitted == 100

    def test_uniformity_chi_square_smoke(self):
        # small version; the 2000-run criterion lives in the acceptance suite
        n, k, runs = 400, 20, 400
        counts = np.zeros(n)
        for r in range(runs):
            mem = EpisodicMemory(capacity=k, seed=r)
            for i in range(n):
                mem.insert(mk_event(i), 0.1, ceiling=0.9)
            for e in mem.events:
                counts[int(e.id[1:])] += 1
        expected = runs * k / n
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        # dof = 399; 99th percentile of chi2(399) ~ 466.6
        assert chi2 < 466.6


def scored_stream(aggs):
    return [ScoredEvent(mk_event(i), IncongruityScore(a, {})) for i, a in enumerate(aggs)]


class TestGuard:
    def test_all_benign_admitted(self):
        out = poisoning_guard(scored_stream([0.1, 0.5, 0.89]), ceiling=0.9)
        assert len(out.admitted) == 3
        assert out.quarantined == []

    def test_high_scores_quarantined(self):
        out = poisoning_guard(scored_stream([0.1, 0.95, 0.99]), ceiling=0.9)
        assert [s.event.id for s in out.quarantined] == ["m1", "m2"]

    def test_approval_overrides(self):
        out = poisoning_guard(scored_stream([0.95]), ceiling=0.9, approvals=frozenset({"m0"}))
        assert len(out.admitted) == 1

    @given(st.lists(st.floats(min_value=0, max_value=1), min_size=1, max_size=50),
           st.floats(min_value=0.1, max_value=1.0))
    @settings(max_examples=80, deadline=None)
    def test_guard_soundness_property(self, aggs, ceiling):
        out = poisoning_guard(scored_stream(aggs), ceiling=ceiling)
        for s in out.admitted:
            assert s.score.aggregate < ceiling
        assert len(out.admitted) + len(out.quarantined) == len(aggs)


class TestAssembleBatch:
    def _memory(self):
        mem = EpisodicMemory(capacity=50, seed=3)
        for i in range(50):
            mem.insert(mk_event(i), 0.1, ceiling=0.9)
        return mem

    def test_memory_only(self):
        batch = assemble_batch(self._memory(), [mk_event(100)], [mk_event(200)],
                               size=30, ratios=(1.0, 0.0, 0.0))
        assert len(batch) == 30
        assert all(int(e.id[1:]) < 50 for e in batch)

    def test_exact_default_composition(self):
        recent = [mk_event(100 + i) for i in range(40)]
        fps = [mk_event(200 + i) for i in range(10)]
        batch = assemble_batch(self._memory(), recent, fps, size=100)
        kinds = Counter(
            "mem" if int(e.id[1:]) < 50 else ("recent" if int(e.id[1:]) < 200 else "fp")
            for e in batch
        )
        assert kinds == Counter({"mem": 40, "recent": 50, "fp": 10})

    def test_empty_source_renormalizes_with_warning(self, caplog):
        recent = [mk_event(100 + i) for i in range(10)]
        with caplog.at_level(logging.WARNING):
            batch = assemble_batch(self._memory(), recent, [], size=90)
        assert len(batch) == 90
        assert any("renormalizing" in r.message for r in caplog.records)
        kinds = Counter("mem" if int(e.id[1:]) < 50 else "recent" for e in batch)
        assert kinds["mem"] == 40 and kinds["recent"] == 50

    def test_ratios_must_sum_to_one(self):
        with pytest.raises(ValueError):
            assemble_batch(self._memory(), [], [], size=10, ratios=(0.5, 0.1, 0.1))

    def test_adversarial_stream_never_trains_unapproved(self):
        """Guarded flow: events >= ceiling can only reach a batch through
        memory/recent if the guard admitted them, which it never does."""
        mem = EpisodicMemory(capacity=20, seed=4)
        hostile = scored_stream([0.99] * 30 + [0.2] * 30)
        admitted = poisoning_guard(hostile, ceiling=0.9).admitted
        for s in admitted:
            mem.insert(s.event, s.score.aggregate, ceiling=0.9)
        batch = assemble_batch(mem, [s.event for s in admitted], [], size=40,
                               ratios=(0.5, 0.5, 0.0))
        hostile_ids = {s.event.id for s in hostile if s.score.aggregate >= 0.9}
        assert all(e.id not in hostile_ids for e in batch)
