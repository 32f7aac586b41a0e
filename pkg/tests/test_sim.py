import json

import numpy as np
import pytest

from markov_infodesign import dynamics as dyn
from markov_infodesign import sim
from markov_infodesign.game_core import Policy, SelectionRule, SignalingRule


@pytest.fixture
def markov_profile(load_fixture):
    game = load_fixture("markov2")
    rng = np.random.default_rng(3)
    pi = Policy(rng.dirichlet(np.ones(2), size=(1, 2, 2, 2)))
    return game, SignalingRule.uniform(game), SelectionRule.obedient(game), pi


def test_default_horizon(markov_profile, load_fixture):
    game = markov_profile[0]
    T = sim.default_horizon(game)
    rmax = game.reward_bound
    assert game.gamma ** T * rmax / (1 - game.gamma) < 1e-6
    assert game.gamma ** (T - 1) * rmax / (1 - game.gamma) >= 1e-6
    assert sim.default_horizon(load_fixture("chicken")) == 1


def test_seeded_and_worker_independent(markov_profile, monkeypatch):
    monkeypatch.setattr(sim, "CHUNK", 64)
    a = sim.simulate(*markov_profile, n_rollouts=300, horizon=20, seed=9, workers=1)
    b = sim.simulate(*markov_profile, n_rollouts=300, horizon=20, seed=9, workers=3)
    c = sim.simulate(*markov_profile, n_rollouts=300, horizon=20, seed=10, workers=1)
    assert np.array_equal(a.actions, b.actions) and np.array_equal(a.rewards, b.rewards)
    assert not np.array_equal(a.actions, c.actions)


def test_first_rollouts_prefix_stable(markov_profile):
    small = sim.simulate(*markov_profile, n_rollouts=5, horizon=10, seed=2)
    big = sim.simulate(*markov_profile, n_rollouts=50, horizon=10, seed=2)
    assert np.array_equal(small.states, big.states[:5])


def test_rollout_records(markov_profile):
    game = markov_profile[0]
    tr = sim.rollout(*markov_profile, T=4, seed=1)
    assert len(tr) == 1 and tr.states.shape == (1, 4)
    lines = sim.to_jsonl(game, tr).splitlines()
    assert len(lines) == 4
    rec = json.loads(lines[0])
    assert set(rec) == {"episode", "period", "types", "state", "principal_signals", "other_signals",
                        "selected_signals", "actions", "rewards"}
    with pytest.raises(ValueError):
        sim.rollout(*markov_profile, T=0, seed=1)


def test_empty_estimate_rejected(markov_profile):
    game = markov_profile[0]
    tr = sim.simulate(*markov_profile, n_rollouts=3, horizon=5, seed=0)
    with pytest.raises(ValueError, match="insufficient"):
        sim.estimate_occupancy(tr[0:0], game.gamma, game)


def test_identical_deviation_zero_gain(markov_profile):
    game = markov_profile[0]
    pi = Policy.deterministic(game, np.zeros((1, 2, 2, 2), dtype=int))
    prof = markov_profile[:3] + (pi,)
    gain, se = sim.empirical_deviation_gain(*prof, {"agent": 0, "policy": np.zeros((2, 2, 2), int)},
                                            n_rollouts=200, T=30, seed=4)
    assert gain == 0.0 and se == 0.0


def test_empirical_returns_match_values(markov_profile):
    game = markov_profile[0]
    tr = sim.simulate(*markov_profile, n_rollouts=20000, seed=5)
    ret = tr.discounted_returns(game.gamma)[:, 0]
    exact = dyn.compute_values(game, *markov_profile[1:]).ex_ante(game)[0]
    assert abs(ret.mean() - exact) <= 4 * ret.std() / np.sqrt(len(ret))


def test_correlated_policy_deviation(load_fixture):
    game = load_fixture("chicken")
    mix = np.zeros((1, 4, 1, 4))
    mix[..., [1, 2]] = 0.5
    pi = Policy(mix, correlated=True)
    _, pi_dev = sim.deviating_profile(game, SelectionRule.obedient(game), pi, 0,
                                      policy_table=np.zeros((1, 2, 1), int))
    joint = pi_dev.joint(game)
    np.testing.assert_allclose(joint[0, 0, 0], [0.5, 0.5, 0.0, 0.0])
