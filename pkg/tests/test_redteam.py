"""Adversarial agent: actions, findings, reward, policy, training."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aegisim.lifegen import (
    ATTACKER_ADDRESS,
    Action,
    TopologyConfig,
    build_world,
    execute,
    truth,
)
from aegisim.redteam import (
    AgentKnowledge,
    Policy,
    ReconEnv,
    RewardConfig,
    TrainConfig,
    act,
    coverage,
    default_dictionary,
    efficiency,
    enumerate_actions,
    evaluate,
    merge_findings,
    parse_outcome,
    recon_dictionary,
    reward,
    train,
)
from aegisim.redteam.knowledge import EpisodeTrace

TOY_ZONES = {1: 1, 2: 1, 3: 1, 4: 1, 5: 1, 6: 1}


@pytest.fixture(scope="module")
def toy_world():
    return build_world(TopologyConfig(zone_sizes=dict(TOY_ZONES), seed=2))


class TestDictionary:
    def test_minimum_command_set(self):
        names = set(default_dictionary().names())
        required = {"ping_sweep", "tcp_probe", "banner_grab", "http_get", "list_shares",
                    "read_file", "exfiltrate", "delete_logs", "wait"}
        assert required <= names

    def test_every_template_names_its_phase(self):
        for t in default_dictionary().templates:
            assert t.phase

    def test_wait_has_zero_parameters(self):
        assert default_dictionary().get("wait").params == ()

    def test_phase_filter(self):
        recon = default_dictionary().for_phase("reconnaissance")
        assert "tcp_probe" in recon.names()
        assert "exfiltrate" not in recon.names()


class TestEnumerate:
    def test_empty_knowledge_only_sweep_wait_blind(self):
        k = AgentKnowledge(address_space=("10.0.1.10", "10.0.2.10", "10.0.3.10"))
        actions = enumerate_actions(recon_dictionary(), k, actor=ATTACKER_ADDRESS)
        commands = {a.command for a in actions}
        assert commands == {"wait", "ping_sweep", "tcp_probe"}
        blind_hosts = {a.params["host"] for a in actions if a.command == "tcp_probe"}
        assert len(blind_hosts) == 2  # bounded blind probing

    def test_open_port_unlocks_banner_and_http(self):
        k = AgentKnowledge(address_space=("10.0.2.10",))
        h = k.host("10.0.2.10")
        h.alive = True
        h.ports[80] = "open"
        actions = enumerate_actions(recon_dictionary(), k, actor=ATTACKER_ADDRESS)
        commands = {a.command for a in actions}
        assert "banner_grab" in commands
        assert "http_get" in commands

    def test_cap_respected_exhaustively(self, toy_world):
        t = truth(toy_world)
        k = AgentKnowledge(address_space=tuple(sorted(h.address for h in toy_world.hosts.values())))
        # saturate knowledge: everything discovered
        for item in t.items:
            parts = item.key.split(":")
            if parts[0] == "host":
                k.host(parts[1]).alive = True
            elif parts[0] == "port":
                k.host(parts[1]).ports[int(parts[2])] = "open"
            elif parts[0] == "share":
                k.host(parts[1]).shares.append(parts[2])
        for cap in (5, 20, 100):
            actions = enumerate_actions(default_dictionary(), k, actor="PC01/rat", cap=cap)
            assert len(actions) <= cap

    def test_deterministic_ordering(self):
        k = AgentKnowledge(address_space=("10.0.1.10", "10.0.2.10"))
        a = enumerate_actions(recon_dictionary(), k, actor=ATTACKER_ADDRESS)
        b = enumerate_actions(recon_dictionary(), k, actor=ATTACKER_ADDRESS)
        assert [(x.command, tuple(sorted(x.params.items()))) for x in a] == \
            [(x.command, tuple(sorted(x.params.items()))) for x in b]


class TestAct:
    def _policy_env(self, toy_world):
        env = ReconEnv(toy_world.copy(), recon_dictionary(), RewardConfig(),
                       actor=ATTACKER_ADDRESS, episode_len=20)
        policy = Policy.fresh(env.state_dim, env.n_actions, seed=3)
        # make the distribution peaked on one valid action
        mask = env.valid_mask()
        target = int(np.flatnonzero(mask)[0])
        policy.actor.b2[:] = -3.0
        policy.actor.b2[target] = 8.0
        policy.actor.w2[:] = 0.0
        policy.actor.w1[:] = 0.0
        return env, policy, mask, target

    def test_eps_zero_matches_softmax_frequency(self, toy_world):
        env, policy, mask, target = self._policy_env(toy_world)
        state = env.state()
        p = policy.distribution(state, mask)
        rng = np.random.default_rng(7)
        draws = [act(policy, state, 0.0, mask, rng) for _ in range(10_000)]
        freq = draws.count(target) / 10_000
        assert freq == pytest.approx(p[target], abs=0.02)

    def test_eps_one_never_argmax(self, toy_world):
        env, policy, mask, target = self._policy_env(toy_world)
        state = env.state()
        rng = np.random.default_rng(8)
        draws = [act(policy, state, 1.0, mask, rng) for _ in range(10_000)]
        assert draws.count(target) / 10_000 < 0.001

    def test_eps_mixture_fraction(self, toy_world):
        env, policy, mask, target = self._policy_env(toy_world)
        state = env.state()
        p = policy.distribution(state, mask)
        eps = 0.3
        # oracle: P(non-argmax) = (1 - eps) * (1 - p[argmax]) + eps
        expect = (1 - eps) * (1 - p[target]) + eps
        rng = np.random.default_rng(9)
        draws = [act(policy, state, eps, mask, rng) for _ in range(10_000)]
        measured = sum(d != target for d in draws) / 10_000
        assert measured == pytest.approx(expect, abs=0.03)

    def test_simplex(self, toy_world):
        env = ReconEnv(toy_world.copy(), recon_dictionary(), RewardConfig(),
                       actor=ATTACKER_ADDRESS, episode_len=5)
        policy = Policy.fresh(env.state_dim, env.n_actions, seed=4)
        for seed in range(20):
            rng = np.random.default_rng(seed)
            state = rng.random(env.state_dim)
            p = policy.distribution(state, env.valid_mask())
            assert abs(p.sum() - 1.0) < 1e-9

    def test_invalid_eps(self, toy_world):
        env, policy, mask, _ = self._policy_env(toy_world)
        with pytest.raises(ValueError):
            act(policy, env.state(), 1.5, mask, np.random.default_rng(0))


class TestParseOutcome:
    def test_probe_response(self, toy_world):
        w = toy_world.copy()
        out = execute(w, Action("tcp_probe", ATTACKER_ADDRESS, {"host": "websrv", "port": 80}))
        findings = parse_outcome(out)
        assert len(findings) == 1
        f = findings[0]
        assert (f.kind, f.port) == ("port_state", 80)
        assert f.value.startswith("open")
        assert "http" in f.value

    def test_wait_yields_nothing(self, toy_world):
        out = execute(toy_world.copy(), Action("wait", ATTACKER_ADDRESS))
        assert parse_outcome(out) == []

    def test_parse_lossless_vs_world_truth(self, toy_world):
        """Cross-check: parsing every probe/banner/share response recovers
        exactly the truth items for the probed entry."""
        w = toy_world.copy()
        t = truth(w)
        keys = t.keys()
        k = AgentKnowledge(address_space=tuple(sorted(h.address for h in w.hosts.values()
                                                      if h.zone != 6)))
        sweep = execute(w, Action("ping_sweep", "PC01/rat"))
        merge_findings(k, Action("ping_sweep", "PC01/rat"), parse_outcome(sweep))
        for addr in k.address_space:
            host = w.host_by_address(addr)
            for port in (22, 80, 443, 445, 3128):
                out = execute(w, Action("tcp_probe", "PC01/rat", {"host": host.id, "port": port}))
                merge_findings(k, Action("tcp_probe", "PC01/rat", {"host": addr, "port": port}),
                               parse_outcome(out))
                out = execute(w, Action("banner_grab", "PC01/rat", {"host": host.id, "port": port}))
                merge_findings(k, Action("banner_grab", "PC01/rat", {"host": addr, "port": port}),
                               parse_outcome(out))
            out = execute(w, Action("list_shares", "PC01/rat", {"host": host.id}))
            merge_findings(k, Action("list_shares", "PC01/rat", {"host": addr}),
                           parse_outcome(out))
        discovered = k.truth_keys()
        # soundness: nothing false
        assert discovered <= keys
        # completeness over the probed surface: every host/port/service/share found
        for key in keys:
            if key.split(":")[0] in ("host", "port", "service", "share"):
                assert key in discovered, key


class TestReward:
    RC = RewardConfig()

    def test_wait_strictly_negative(self):
        r = reward([], {}, Action("wait", "a"), self.RC)
        assert r < 0

    def test_rediscovery_pays_nothing(self):
        tiers = {"port:x:80": "probe"}
        first = reward(["port:x:80"], tiers, Action("tcp_probe", "a"), self.RC)
        again = reward([], tiers, Action("tcp_probe", "a"), self.RC)
        assert first > again
        assert again == pytest.approx(-self.RC.action_cost)

    def test_threat_linearity(self):
        rc = RewardConfig(stealth_weight=1.0)
        a = reward([], {}, Action("tcp_probe", "x"), rc, threat=0.9)
        b = reward([], {}, Action("tcp_probe", "x"), rc, threat=0.1)
        assert b - a == pytest.approx(0.8)

    def test_tier_bonuses(self):
        tiers = {"host:1": "trivial", "port:1": "probe", "share:1": "sequence"}
        r = reward(["host:1", "port:1", "share:1"], tiers, Action("tcp_probe", "x"), self.RC)
        assert r == pytest.approx(1 + 3 + 6 - self.RC.action_cost)

    def test_normalization_clip(self):
        rc = RewardConfig(normalize=True)
        assert reward([], {}, Action("wait", "x"), rc) == 0.0
        assert reward(["a"], {"a": "sequence"}, Action("tcp_probe", "x"), rc) == 1.0

    def test_wait_penalty_must_be_positive(self):
        with pytest.raises(ValueError):
            RewardConfig(wait_penalty=-1.0)

    def test_determinism(self):
        tiers = {"host:1": "trivial"}
        args = (["host:1"], tiers, Action("tcp_probe", "x"), self.RC)
        assert reward(*args) == reward(*args)


class TestCoverageEfficiency:
    def test_empty_knowledge_zero(self, toy_world):
        k = AgentKnowledge(address_space=())
        assert coverage(k, truth(toy_world)) == 0.0

    def test_full_knowledge_one(self, toy_world):
        t = truth(toy_world)
        k = AgentKnowledge(address_space=())
        for item in t.items:
            parts = item.key.split(":")
            h = k.host(parts[1])
            if parts[0] == "host":
                h.alive = True
            elif parts[0] == "port":
                h.ports[int(parts[2])] = "open"
            elif parts[0] == "service":
                h.services[int(parts[2])] = ":".join(parts[3:])
            elif parts[0] == "share":
                h.shares.append(":".join(parts[2:]))
            elif parts[0] == "vuln":
                h.vuln = ":".join(parts[2:])
        assert coverage(k, t) == 1.0

    def test_half_discovered_hand_value(self):
        from aegisim.lifegen import TruthItem, WorldTruth

        t = WorldTruth(items=frozenset({
            TruthItem("host:10.0.0.1", "trivial"),
            TruthItem("host:10.0.0.2", "trivial"),
            TruthItem("port:10.0.0.1:80", "probe"),
            TruthItem("port:10.0.0.2:80", "probe"),
        }))
        k = AgentKnowledge(address_space=("10.0.0.1", "10.0.0.2"))
        k.host("10.0.0.1").alive = True
        k.host("10.0.0.1").ports[80] = "open"
        assert coverage(k, t) == 0.5

    def test_all_wait_efficiency_zero(self):
        trace = EpisodeTrace(actions=("wait",) * 10, new_keys_per_step=(0,) * 10,
                             rewards=(-0.55,) * 10)
        assert efficiency(trace) == 0.0

    def test_hand_counted_trace(self):
        trace = EpisodeTrace(actions=("ping_sweep", "tcp_probe", "tcp_probe", "wait"),
                             new_keys_per_step=(3, 1, 0, 0), rewards=(0, 0, 0, 0))
        assert efficiency(trace) == 1.0

    def test_empty_trace_rejected(self):
        with pytest.raises(ValueError):
            efficiency(EpisodeTrace(actions=(), new_keys_per_step=(), rewards=()))


class TestJointLearning:
    def test_threat_feedback_shapes_reward(self, toy_world):
        """Joint mode: the defender's score enters the reward, so the same
        action sequence scores strictly lower when every move is seen as
        anomalous."""
        def hot_threat(events):
            return 1.0

        base_env = ReconEnv(toy_world.copy(), recon_dictionary(), RewardConfig(),
                            actor="PC01/rat", episode_len=20)
        joint_env = ReconEnv(toy_world.copy(), recon_dictionary(),
                             RewardConfig(stealth_weight=0.5),
                             actor="PC01/rat", episode_len=20, threat_fn=hot_threat)
        rng = np.random.default_rng(31)
        base_env.reset()
        joint_env.reset()
        base_total = joint_total = 0.0
        for _ in range(20):
            a = int(rng.choice(np.flatnonzero(base_env.valid_mask())))
            _, rb, _, _ = base_env.step(a)
            _, rj, _, _ = joint_env.step(a)
            base_total += rb
            joint_total += rj
        assert joint_total == pytest.approx(base_total - 0.5 * 20)

    def test_threat_fn_receives_emitted_events(self, toy_world):
        seen = []

        def spy(events):
            seen.append(len(events))
            return 0.0

        env = ReconEnv(toy_world.copy(), recon_dictionary(), RewardConfig(stealth_weight=1.0),
                       actor="PC01/rat", episode_len=3, threat_fn=spy)
        env.reset()
        env.step(0)
        assert seen and seen[0] >= 1


class TestKnowledgeSoundness:
    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=15, deadline=None)
    def test_random_action_sequences_stay_sound(self, seed):
        world = build_world(TopologyConfig(zone_sizes=dict(TOY_ZONES), seed=3))
        env = ReconEnv(world, recon_dictionary(), RewardConfig(),
                       actor="PC01/rat", episode_len=30)
        rng = np.random.default_rng(seed)
        env.reset()
        done = False
        while not done:
            valid = np.flatnonzero(env.valid_mask())
            _, _, done, _ = env.step(int(rng.choice(valid)))
        assert env.knowledge.truth_keys() <= truth(world).keys()


class TestTraining:
    def test_toy_world_reaches_greedy_oracle_share(self, toy_world):
        """Oracle: depth-1 greedy full-knowledge planner on the same env."""
        rc = RewardConfig()
        d = recon_dictionary()

        def env_factory(i):
            return ReconEnv(toy_world.copy(), d, rc, actor="PC01/rat", episode_len=40)

        policy = train(env_factory, TrainConfig(episodes=800, n_replicas=4,
                                                episode_len=40, seed=6, entropy_bonus=0.01))
        env = ReconEnv(toy_world.copy(), d, rc, actor="PC01/rat", episode_len=40)
        trained = evaluate(env, policy, episodes=10, seed=77)

        # greedy oracle: at each step pick the valid action with the highest
        # immediate reward, knowing the world
        genv = ReconEnv(toy_world.copy(), d, rc, actor="PC01/rat", episode_len=40)
        s = genv.reset()
        total = 0.0
        done = False
        while not done:
            best_a, best_r = None, -np.inf
            for a in np.flatnonzero(genv.valid_mask()):
                action = genv.to_action(int(a))
                keys = _expected_new_keys(genv, action)
                r = reward(keys, genv.tiers, action, rc)
                if r > best_r:
                    best_a, best_r = int(a), r
            s, r, done, _ = genv.step(best_a)
            total += r
        assert trained >= 0.8 * total

    def test_critic_value_close_to_mean_return(self, toy_world):
        rc = RewardConfig()
        d = recon_dictionary()

        def env_factory(i):
            return ReconEnv(toy_world.copy(), d, rc, actor="PC01/rat", episode_len=40)

        cfg = TrainConfig(episodes=800, n_replicas=4, episode_len=40, seed=6, entropy_bonus=0.01)
        policy = train(env_factory, cfg)
        env = ReconEnv(toy_world.copy(), d, rc, actor="PC01/rat", episode_len=40)
        rng = np.random.default_rng(11)
        returns = []
        for _ in range(20):
            s = env.reset()
            done = False
            rewards = []
            while not done:
                a = act(policy, s, 0.0, env.valid_mask(), rng)
                s, r, done, _ = env.step(a)
                rewards.append(r)
            g = 0.0
            for r in reversed(rewards):
                g = r + cfg.gamma * g
            returns.append(g)
        v0 = policy.value(env.reset())
        assert abs(v0 - np.mean(returns)) <= 0.2 * abs(np.mean(returns))

    def test_replica_count_changes_throughput_not_objective(self, toy_world):
        rc = RewardConfig()
        d = recon_dictionary()
        scores = {}
        for n_replicas in (1, 4):
            per_seed = []
            for seed in (1, 2, 3, 4, 5):
                def env_factory(i):
                    return ReconEnv(toy_world.copy(), d, rc, actor="PC01/rat", episode_len=30)

                policy = train(env_factory, TrainConfig(episodes=120, n_replicas=n_replicas,
                                                        episode_len=30, seed=seed))
                env = ReconEnv(toy_world.copy(), d, rc, actor="PC01/rat", episode_len=30)
                per_seed.append(evaluate(env, policy, episodes=5, seed=seed + 50))
            scores[n_replicas] = float(np.mean(per_seed))
        assert abs(scores[1] - scores[4]) <= 0.10 * max(abs(scores[1]), abs(scores[4]))


def _expected_new_keys(env, action):
    """What truth keys would this action newly establish (oracle helper)."""
    k = env.knowledge
    world = env.world
    cmd = action.command
    out = []
    if cmd == "ping_sweep":
        for h in world.hosts.values():
            if h.zone != 6 and (action.actor_host() in world.hosts or h.zone in (1, 2)):
                hk = k.hosts.get(h.address)
                if not (hk and hk.alive):
                    out.append(f"host:{h.address}")
    elif cmd == "tcp_probe":
        host = world.hosts.get(str(action.params.get("host"))) or world.host_by_address(
            str(action.params.get("host")))
        if host:
            port = int(action.params["port"])
            hk = k.hosts.get(host.address)
            if host.port_state(port) == "open" and not (hk and hk.ports.get(port) == "open"):
                out.append(f"port:{host.address}:{port}")
    elif cmd == "banner_grab":
        host = world.hosts.get(str(action.params.get("host"))) or world.host_by_address(
            str(action.params.get("host")))
        if host:
            port = int(action.params["port"])
            spec = host.ports.get(port)
            hk = k.hosts.get(host.address)
            if spec and spec.state == "open" and not (hk and port in hk.services):
                out.append(f"service:{host.address}:{port}:{spec.service}/{spec.version}")
    elif cmd == "list_shares":
        host = world.hosts.get(str(action.params.get("host"))) or world.host_by_address(
            str(action.params.get("host")))
        if host:
            hk = k.hosts.get(host.address)
            for s in world.shares.get(host.id, []):
                if not (hk and s.path in hk.shares):
                    out.append(f"share:{host.address}:{s.path}")
    elif cmd == "http_get" and str(action.params.get("path")) == "/version-check":
        host = world.hosts.get(str(action.params.get("host"))) or world.host_by_address(
            str(action.params.get("host")))
        if host and host.vulnerable:
            hk = k.hosts.get(host.address)
            if not (hk and hk.vuln):
                out.append(f"vuln:{host.address}:bash/4.2")
    return out
