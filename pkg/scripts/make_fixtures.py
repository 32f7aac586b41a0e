"""Regenerate the shipped fixture games."""
import pathlib

import itertools
import json

import numpy as np

from markov_infodesign import equilibrium as eqm
from markov_infodesign import formats
from markov_infodesign.game_core import (GameSpec, Goal, Policy, SelectionRule, SignalingRule,
                                         serialize_game)

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "markov_infodesign" / "fixtures"


def two_player(payoff, actions, gamma):
    """Symmetric one-state bimatrix game; payoff[mine, theirs]."""
    rew = np.zeros((2, 4, 1, 2, 1))
    for a in range(4):
        a0, a1 = divmod(a, 2)
        rew[0, a] = payoff[a0, a1]
        rew[1, a] = payoff[a1, a0]
    return GameSpec(n_agents=2, states=["g0"], actions=actions, types=["t0"], signals=["s0", "s1"],
                    n_sources=1, principal_source=0, transition=np.ones((1, 4, 1)),
                    state_init=[1.0], type_prior=[1.0], nonprincipal_dist=[1.0], rewards=rew,
                    principal_reward=rew.sum(axis=0)[:, :, 0, :], gamma=gamma, gamma_hat=gamma)


def prisoners_dilemma():
    return two_player(np.array([[3.0, 0.0], [5.0, 1.0]]), ["cooperate", "defect"], 0.9)


def prisoners_dilemma_static():
    return two_player(np.array([[3.0, 0.0], [5.0, 1.0]]), ["cooperate", "defect"], 0.0)


def chicken():
    return two_player(np.array([[0.0, 7.0], [2.0, 6.0]]), ["dare", "chicken"], 0.0)


def persuasion():
    """Agent 0 judges; agent 1's type is the hidden guilt and its dominant action reveals it."""
    acts = ["acquit", "convict"]
    rew = np.zeros((2, 4, 1, 2, 2))
    for a in range(4):
        a0, a1 = divmod(a, 2)
        rew[0, a] = 1.0 if a0 == a1 else 0.0
        for k in range(2):
            rew[1, a, 0, :, k] = 1.0 if a1 == k else 0.0
    principal = np.zeros((4, 1, 4))
    for a in range(4):
        principal[a] = 1.0 if a // 2 == 1 else 0.0
    return GameSpec(n_agents=2, states=["court"], actions=acts, types=["innocent", "guilty"],
                    signals=["s0", "s1"], n_sources=1, principal_source=0,
                    transition=np.ones((1, 4, 1)), state_init=[1.0], type_prior=[0.7, 0.3],
                    nonprincipal_dist=[1.0], rewards=rew, principal_reward=principal,
                    gamma=0.0, gamma_hat=0.0)


def chain2():
    trans = np.array([[[0.0, 1.0]], [[1.0, 0.0]]])
    rew = np.zeros((1, 1, 2, 1, 1))
    rew[0, 0, 0] = 1.0
    return GameSpec(n_agents=1, states=["g0", "g1"], actions=["a0"], types=["t0"], signals=["s0"],
                    n_sources=1, principal_source=0, transition=trans, state_init=[1.0, 0.0],
                    type_prior=[1.0], nonprincipal_dist=[1.0], rewards=rew,
                    principal_reward=np.zeros((1, 2, 1)), gamma=0.9, gamma_hat=0.9)


def markov2():
    """Single agent, two states, two actions, two signals from two sources, two types."""
    trans = np.array([[[0.8, 0.2], [0.3, 0.7]], [[0.5, 0.5], [0.1, 0.9]]])
    rew = np.zeros((1, 2, 2, 2, 2))
    rew[0, :, :, 0, 0] = [[1.0, 0.0], [0.2, 0.5]]
    rew[0, :, :, 1, 0] = [[0.8, 0.1], [0.4, 0.6]]
    rew[0, :, :, 0, 1] = [[0.0, 1.0], [0.5, 0.3]]
    rew[0, :, :, 1, 1] = [[0.3, 0.9], [0.7, 0.2]]
    principal = np.array([[[1.0, 0.0], [0.5, 0.5]], [[0.0, 1.0], [0.2, 0.8]]])
    return GameSpec(n_agents=1, states=["g0", "g1"], actions=["a0", "a1"], types=["t0", "t1"],
                    signals=["s0", "s1"], n_sources=2, principal_source=0, transition=trans,
                    state_init=[0.6, 0.4], type_prior=[0.5, 0.5], nonprincipal_dist=[0.35, 0.65],
                    rewards=rew, principal_reward=principal, gamma=0.9, gamma_hat=0.9)


def point_goal(game, weights):
    """Goal placing the given weights on joint actions in every state and joint type."""
    tab = np.zeros((game.n_states, game.n_joint_types, game.n_joint_actions))
    for a, w in weights.items():
        tab[:, :, a] = w
    return Goal(tab)


def constant_policy(game, action):
    return Policy.deterministic(game, np.full((game.n_agents, game.n_states, game.n_signals,
                                               game.n_types), action))


def non_obedient_pbme(game, seed=7):
    """Single-agent best-response iteration from a random rule; returns a selective PBME."""
    from markov_infodesign import dynamics as dyn
    rng = np.random.default_rng(seed)
    alpha = SignalingRule(rng.dirichlet(np.ones(game.n_signal_profiles),
                                        size=(game.n_states, game.n_joint_types)))
    beta, pi = SelectionRule.obedient(game), Policy.uniform(game)
    bt = game.batch_table
    for _ in range(100):
        q = dyn.compute_values(game, alpha, beta, pi, tol=1e-12).Q[0]      # (K, G, S, A)
        best_action = q.argmax(axis=-1)                                   # (K, G, S)
        best_value = q.max(axis=-1)
        # ties go to the last position so that uninformative selections stay non-obedient
        position = game.n_sources - 1 - best_value[:, :, bt][..., ::-1].argmax(axis=-1)
        new_beta = SelectionRule(np.transpose(position, (1, 2, 0))[None])
        new_pi = Policy.deterministic(game, np.transpose(best_action, (1, 2, 0))[None])
        if np.array_equal(new_beta.table, beta.table) and np.array_equal(new_pi.table, pi.table):
            break
        beta, pi = new_beta, new_pi
    if beta.is_obedient(game) or not eqm.check_pbme(game, alpha, beta, pi).is_equilibrium:
        raise RuntimeError("no selective equilibrium found")
    return alpha, beta, pi


def dump(name, doc):
    (OUT / name).write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")


def markov2_plain():
    """markov2 with rewards that ignore the signal value."""
    base = markov2()
    rew = np.array(base.rewards)
    rew[:, :, :, 1, :] = rew[:, :, :, 0, :]
    return GameSpec(n_agents=1, states=base.states, actions=base.actions, types=base.types,
                    signals=base.signals, n_sources=2, principal_source=0, transition=base.transition,
                    state_init=base.state_init, type_prior=base.type_prior,
                    nonprincipal_dist=base.nonprincipal_dist, rewards=rew,
                    principal_reward=base.principal_reward, gamma=0.9, gamma_hat=0.9)


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    games = {}
    for name, build in (("pd2", prisoners_dilemma), ("pd_static", prisoners_dilemma_static),
                        ("chicken", chicken), ("persuasion", persuasion),
                        ("chain2", chain2), ("markov2", markov2), ("markov2_plain", markov2_plain)):
        games[name] = build()
        (OUT / f"{name}.game").write_text(serialize_game(games[name]))
    pd, pds, ch, mk = games["pd2"], games["pd_static"], games["chicken"], games["markov2"]
    ob = SelectionRule.obedient(pd)
    dump("pd2_defect.profile.json",
         formats.profile_to_dict(pd, SignalingRule.uniform(pd), ob, constant_policy(pd, 1)))
    dump("pd_static_cooperate.goal.json", formats.goal_to_dict(pds, point_goal(pds, {0: 1.0})))
    dump("chicken_mix.goal.json", formats.goal_to_dict(ch, point_goal(ch, {1: 0.5, 2: 0.5})))
    dump("chicken_dare.goal.json", formats.goal_to_dict(ch, point_goal(ch, {0: 1.0})))
    rng = np.random.default_rng(11)
    pol = rng.dirichlet(np.ones(mk.n_actions), size=(1, mk.n_states, mk.n_signals, mk.n_types))
    dump("markov2_random.profile.json",
         formats.profile_to_dict(mk, SignalingRule.uniform(mk), SelectionRule.obedient(mk), Policy(pol)))
    dump("markov2_selective.profile.json", formats.profile_to_dict(mk, *non_obedient_pbme(mk)))
    mp = games["markov2_plain"]
    dump("markov2_plain_selective.profile.json", formats.profile_to_dict(mp, *non_obedient_pbme(mp)))
