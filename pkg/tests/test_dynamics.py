import numpy as np
import pytest

from markov_infodesign import dynamics as dyn
from markov_infodesign import generators as gen
from markov_infodesign.game_core import GameSpec, Policy, SelectionRule, SignalingRule


def single_cell_game(gamma=0.9):
    return GameSpec(n_agents=1, states=["g"], actions=["a"], types=["t"], signals=["s"], n_sources=1,
                    principal_source=0, transition=np.ones((1, 1, 1)), state_init=[1.0],
                    type_prior=[1.0], nonprincipal_dist=[1.0], rewards=np.full((1, 1, 1, 1, 1), 2.0),
                    principal_reward=np.zeros((1, 1, 1)), gamma=gamma, gamma_hat=gamma)


def obedient_uniform(game):
    return SignalingRule.uniform(game), SelectionRule.obedient(game), Policy.uniform(game)


def test_single_cell_mass_and_value():
    game = single_cell_game()
    prof = obedient_uniform(game)
    occ = dyn.occupancy_from_profile(game, *prof)
    assert occ.table.size == 1
    assert occ.table.ravel()[0] == pytest.approx(10.0, abs=1e-9)
    vals = dyn.compute_values(game, *prof)
    assert vals.J[0, 0, 0] == pytest.approx(20.0, abs=1e-8)


def test_static_game_values_are_expected_rewards():
    game = single_cell_game(gamma=0.0)
    vals = dyn.compute_values(game, *obedient_uniform(game))
    assert vals.J[0, 0, 0] == pytest.approx(2.0)
    assert vals.iterations <= 2


def test_chain_closed_form(load_fixture):
    game = load_fixture("chain2")
    vals = dyn.compute_values(game, *obedient_uniform(game))
    g = game.gamma
    np.testing.assert_allclose(vals.J[0, 0], [1 / (1 - g * g), g / (1 - g * g)], atol=1e-9)


def test_values_match_direct_solve(rng):
    for _ in range(5):
        game = gen.random_game(rng, n_agents=2, n_states=3, n_sources=2, gamma=0.9)
        alpha = gen.random_signaling_rule(rng, game)
        beta = gen.random_selection_rule(rng, game)
        pi = gen.random_policy(rng, game)
        vals = dyn.compute_values(game, alpha, beta, pi)
        law = dyn.profile_distribution(game, alpha, beta, pi)
        np.testing.assert_allclose(vals.J, dyn.direct_state_values(game, law), atol=1e-8)
        assert vals.residual <= 1e-8


def test_profile_distribution_normalized(rng):
    game = gen.random_game(rng, n_agents=2, n_sources=2)
    law = dyn.profile_distribution(game, gen.random_signaling_rule(rng, game),
                                   gen.random_selection_rule(rng, game), gen.random_policy(rng, game))
    np.testing.assert_allclose(law.sum(axis=(2, 3, 4)), 1.0, atol=1e-12)


def test_obedient_selection_kernel_is_identity(rng):
    game = gen.random_game(rng, n_agents=2, n_sources=2)
    sel = dyn.selection_kernel(game, SelectionRule.obedient(game))
    eye = np.eye(game.n_signal_profiles)
    np.testing.assert_allclose(sel, np.broadcast_to(eye, sel.shape), atol=1e-12)


def test_beliefs_are_bayes(load_fixture):
    game = load_fixture("persuasion")
    # fully revealing rule: signal equals the defendant's type
    tab = np.zeros((1, 4, 4))
    for t in range(4):
        k1 = game.joint_type_table[t, 1]
        tab[0, t, game.signal_profile_table.tolist().index([k1, k1])] = 1.0
    mu = dyn.update_beliefs(game, SignalingRule(tab))
    # the judge (agent 0) hearing s1 is sure the defendant is guilty
    post = mu.table[0, 0, 1]                                   # (own type, others' signals, others' types)
    np.testing.assert_allclose(post.sum(axis=1)[0], [0.0, 1.0], atol=1e-12)


def test_round_trips(rng):
    game = gen.random_game(rng, n_agents=2, n_states=2, n_sources=1, n_signals=2)
    alpha = gen.random_signaling_rule(rng, game)
    beta = SelectionRule.obedient(game)
    pi = gen.random_policy(rng, game, correlated=True)
    occ = dyn.occupancy_from_profile(game, alpha, beta, pi)
    np.testing.assert_allclose(dyn.policy_from_occupancy(occ).table, pi.table, atol=1e-9)
    np.testing.assert_allclose(dyn.recover_rule(occ).table, alpha.table, atol=1e-9)
    assert dyn.flow_residual(game, alpha, occ) < 1e-9


def test_zero_mass_cells_flagged():
    tab = np.zeros((1, 1, 2, 2, 2))
    tab[0, 0, 0, 0, 0] = 1.0
    pol = dyn.policy_from_occupancy(tab)
    assert pol.flags == ((0, 1, 0),)
    np.testing.assert_allclose(pol.table[0, 1, 0], [0.5, 0.5])
    with pytest.raises(ValueError):
        dyn.policy_from_occupancy(-tab)


def test_goal_occupancy_mass(rng):
    game = gen.random_game(rng, gamma=0.5)
    occ = dyn.goal_occupancy(game, gen.random_goal(rng, game))
    np.testing.assert_allclose(occ.sum(axis=(1, 2)), 2.0, atol=1e-10)


def test_truncated_windows(load_fixture):
    game = load_fixture("markov2")
    prof = obedient_uniform(game)
    vals = dyn.compute_values(game, *prof)
    target = vals.J[0, 0] @ game.state_init
    for t in (1, 2, 3):
        seq = dyn.truncated_sequential_occupancy(game, *prof, t=t, T_max=30, joint_type=0)
        bound = 2 * game.reward_bound * game.gamma ** min(t, 30 - t) / (1 - game.gamma)
        assert abs(seq.value(0) - target) <= bound
    with pytest.raises(ValueError):
        dyn.truncated_sequential_occupancy(game, *prof, t=5, T_max=3)


def test_truncated_sequence_cap(load_fixture):
    game = load_fixture("markov2")
    with pytest.raises(dyn.SequenceCapError):
        dyn.truncated_sequential_occupancy(game, *obedient_uniform(game), t=3, cap=10)


def test_convergence_error():
    game = single_cell_game(gamma=0.99)
    with pytest.raises(dyn.ConvergenceError):
        dyn.compute_values(game, *obedient_uniform(game), tol=1e-14, max_iter=5)
