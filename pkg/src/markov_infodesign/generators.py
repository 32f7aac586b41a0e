"""Random game and strategy generators for experiments and tests."""
from __future__ import annotations

import numpy as np

from .game_core import GameSpec, Goal, Policy, SelectionRule, SignalingRule


def random_game(rng: np.random.Generator, n_agents=2, n_states=2, n_actions=2, n_signals=2,
                n_types=2, n_sources=1, principal_source=0, gamma=0.9, gamma_hat=None,
                signal_dependent=True, sparse_transition=False) -> GameSpec:
    """Dirichlet kernels and priors, uniform rewards in [-1, 1]."""
    G, A, S, K, n, m = n_states, n_actions, n_signals, n_types, n_agents, n_sources
    transition = rng.dirichlet(np.ones(G), size=(G, A ** n))
    if sparse_transition:
        transition = np.where(transition < 0.15, 0.0, transition)
        transition[..., 0] += 1e-3
        transition /= transition.sum(-1, keepdims=True)
    rewards = rng.uniform(-1, 1, size=(n, A ** n, G, S, K))
    if not signal_dependent:
        rewards = np.repeat(rewards[:, :, :, :1, :], S, axis=3)
    return GameSpec(
        n_agents=n, states=[f"g{g}" for g in range(G)], actions=[f"a{a}" for a in range(A)],
        types=[f"t{k}" for k in range(K)], signals=[f"s{s}" for s in range(S)],
        n_sources=m, principal_source=principal_source, transition=transition,
        state_init=rng.dirichlet(np.ones(G)), type_prior=rng.dirichlet(np.ones(K)) * 0.9 + 0.1 / K,
        nonprincipal_dist=rng.dirichlet(np.ones(S ** ((m - 1) * n))), rewards=rewards,
        principal_reward=rng.uniform(0, 1, size=(A ** n, G, K ** n)),
        gamma=gamma, gamma_hat=gamma if gamma_hat is None else gamma_hat)


def random_signaling_rule(rng, game: GameSpec, concentration=1.0) -> SignalingRule:
    shape = (game.n_states, game.n_joint_types)
    return SignalingRule(rng.dirichlet(np.full(game.n_signal_profiles, concentration), size=shape))


def random_selection_rule(rng, game: GameSpec) -> SelectionRule:
    shape = (game.n_agents, game.n_states, game.n_batches, game.n_types)
    return SelectionRule(rng.integers(0, game.n_sources, size=shape))


def random_policy(rng, game: GameSpec, concentration=1.0, correlated=False) -> Policy:
    if correlated:
        shape = (game.n_states, game.n_signal_profiles, game.n_joint_types)
        return Policy(rng.dirichlet(np.full(game.n_joint_actions, concentration), size=shape), True)
    shape = (game.n_agents, game.n_states, game.n_signals, game.n_types)
    return Policy(rng.dirichlet(np.full(game.n_actions, concentration), size=shape))


def random_goal(rng, game: GameSpec, concentration=1.0) -> Goal:
    shape = (game.n_states, game.n_joint_types)
    return Goal(rng.dirichlet(np.full(game.n_joint_actions, concentration), size=shape))
