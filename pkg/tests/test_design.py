import numpy as np
import pytest
from sklearn.base import clone

from markov_infodesign import design as dsg
from markov_infodesign import dynamics as dyn
from markov_infodesign import equilibrium as eqm
from markov_infodesign import generators as gen
from markov_infodesign.game_core import GameSpec, Goal, Policy, SelectionRule, SignalingRule
from markov_infodesign.lp import solve_lp
from oracles import bmce_vertex


def point_goal(game, a):
    tab = np.zeros((game.n_states, game.n_joint_types, game.n_joint_actions))
    tab[:, :, a] = 1.0
    return Goal(tab)


def test_trivial_lp_single_variable():
    game = GameSpec(n_agents=1, states=["g"], actions=["a"], types=["t"], signals=["s"], n_sources=1,
                    principal_source=0, transition=np.ones((1, 1, 1)), state_init=[1.0], type_prior=[1.0],
                    nonprincipal_dist=[1.0], rewards=np.zeros((1, 1, 1, 1, 1)),
                    principal_reward=np.zeros((1, 1, 1)), gamma=0.9, gamma_hat=0.9)
    lp = dsg.build_oil_lp(game, point_goal(game, 0))
    assert lp.n_vars == 1
    sol = solve_lp(lp)
    assert sol.x[0] == pytest.approx(10.0)


def test_dimension_cap(load_fixture):
    game = load_fixture("pd2")
    with pytest.raises(dsg.DimensionCapError):
        dsg.build_oil_lp(game, point_goal(game, 3), cap=10)


def test_dominant_strategy_goal_verifies(load_fixture):
    game = load_fixture("pd2")
    res = dsg.design_oil(game, point_goal(game, 3))
    assert res.status == "verified-OIL"
    assert res.verification.admissible
    assert res.slacks.lagrangian_value == pytest.approx(0.0, abs=1e-6)


def test_dominated_goal_infeasible_with_certificate(load_fixture):
    game = load_fixture("pd_static")
    goal = point_goal(game, 0)
    res = dsg.design_oil(game, goal)
    assert res.status == "infeasible"
    lp = dsg.build_oil_lp(game, goal)
    y_eq, y_ub = np.array(res.certificate["eq"]), np.array(res.certificate["ub"])
    assert np.all(y_eq @ lp.A_eq + y_ub @ lp.A_ub >= -1e-8)
    assert y_eq @ lp.b_eq + y_ub @ lp.b_ub < 0
    with pytest.raises(dsg.InfeasibleGoalError):
        dsg.design_oil(game, goal, raise_on_infeasible=True)


def test_chicken_correlated_goal(load_fixture):
    game = load_fixture("chicken")
    goal = Goal(np.array([[[0.0, 0.5, 0.5, 0.0]]]))
    res = dsg.design_oil(game, goal)
    assert res.status == "verified-OIL"
    ok, gap = eqm.check_admissibility(game, res.alpha, SelectionRule.obedient(game), res.policy, goal)
    assert ok
    assert res.slacks.lagrangian_value == pytest.approx(0.0, abs=1e-6)


def test_recovered_rule_round_trip(rng):
    game = gen.random_game(rng, n_agents=2, n_sources=1, gamma=0.8)
    alpha = gen.random_signaling_rule(rng, game)
    occ = dyn.occupancy_from_profile(game, alpha, SelectionRule.obedient(game), gen.random_policy(rng, game))
    np.testing.assert_allclose(dsg.recover_rule(occ).table, alpha.table, atol=1e-6)


def test_select_goal_persuasion(load_fixture):
    game = load_fixture("persuasion")
    kappa, value, res = dsg.select_goal(game)
    assert value == pytest.approx(0.6, abs=1e-6)
    assert res.status == "verified-OIL"


def test_select_goal_dominates_probe(load_fixture, rng):
    game = load_fixture("chicken")
    _, best, _ = dsg.select_goal(game, design=False)
    for _ in range(1000):
        lam = rng.dirichlet(np.ones(3))
        kappa = Goal(sum(l * bmce_vertex(game, rng) for l in lam))
        assert eqm.check_bmce(game, kappa).is_equilibrium
        assert best >= dsg.principal_payoff(game, kappa) - 1e-9


def test_principal_payoff_consistency(rng):
    game = gen.random_game(rng, n_agents=2, n_sources=2, gamma=0.7, gamma_hat=0.5)
    alpha = gen.random_signaling_rule(rng, game)
    beta = gen.random_selection_rule(rng, game)
    pi = gen.random_policy(rng, game)
    marg = Goal(eqm.induced_action_marginal(game, alpha, beta, pi))
    assert dsg.principal_payoff(game, marg) == pytest.approx(
        dsg.principal_payoff_profile(game, alpha, beta, pi), abs=1e-6)


def test_epsilon_zero_and_scaling(load_fixture):
    game = load_fixture("pd2")
    alpha, beta = SignalingRule.uniform(game), SelectionRule.obedient(game)
    defect = Policy.deterministic(game, np.ones((2, 1, 2, 1), dtype=int))
    assert dsg.epsilon_certificate(game, alpha, beta, defect).epsilon == pytest.approx(0.0, abs=1e-9)
    noisy = Policy(0.9 * defect.table + 0.05)
    cert = dsg.epsilon_certificate(game, alpha, beta, noisy)
    assert cert.epsilon > 0
    assert cert.epsilon * (1 - game.gamma_hat) == pytest.approx(cert.phi.max())
    assert cert.agent_bound * (1 - game.gamma) == pytest.approx(cert.phi.max())


def test_directify_preserves_marginal(load_fixture):
    from conftest import FIXTURES
    from markov_infodesign import formats
    game = load_fixture("markov2_plain")
    doc = formats.load_json(FIXTURES / "markov2_plain_selective.profile.json", "profile")
    alpha, beta, pi = formats.profile_from_dict(game, doc)
    assert not beta.is_obedient(game)
    direct = dsg.directify(game, alpha, beta, pi)
    ob = SelectionRule.obedient(game)
    np.testing.assert_allclose(eqm.induced_action_marginal(game, direct, ob, pi),
                               eqm.induced_action_marginal(game, alpha, beta, pi), atol=1e-12)
    assert eqm.check_pbme(game, direct, ob, pi).is_equilibrium


def test_directify_rejects_non_equilibrium(load_fixture):
    game = load_fixture("pd2")
    coop = Policy.deterministic(game, np.zeros((2, 1, 2, 1), dtype=int))
    with pytest.raises(dsg.NotEquilibriumError) as exc:
        dsg.directify(game, SignalingRule.uniform(game), SelectionRule.obedient(game), coop)
    assert not exc.value.report.is_equilibrium


def test_estimators(load_fixture):
    game = load_fixture("chicken")
    goal = Goal(np.array([[[0.0, 0.5, 0.5, 0.0]]]))
    est = dsg.ObedientDesigner(goal=goal, restarts=2).fit(game)
    assert est.status_ == "verified-OIL"
    assert est.score(game) == pytest.approx(dsg.principal_payoff(game, goal), abs=1e-6)
    twin = clone(est)
    assert twin.get_params()["restarts"] == 2 and not hasattr(twin, "status_")
    sel = dsg.GoalSelector().fit(load_fixture("persuasion"))
    assert sel.principal_value_ == pytest.approx(0.6, abs=1e-6)
