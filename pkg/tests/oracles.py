"""Independent brute-force oracles shared by the test suite."""
from __future__ import annotations

import itertools

import numpy as np

from markov_infodesign import equilibrium as eqm
from markov_infodesign import generators as gen
from markov_infodesign.game_core import Policy, SelectionRule

# shapes of the small two-source suite: (agents, states, types)
SELECTIVE_SHAPES = ((2, 1, 1), (1, 1, 2), (1, 2, 1))


def pure_profiles(game):
    """Deterministic (beta, pi) pairs, selections outermost from all-non-principal downward.

    Obedient selections are skipped.
    """
    pol_shape = (game.n_agents, game.n_states, game.n_signals, game.n_types)
    sel_shape = (game.n_agents, game.n_states, game.n_batches, game.n_types)
    positions = range(game.n_sources - 1, -1, -1)
    for sel in itertools.product(positions, repeat=int(np.prod(sel_shape))):
        beta = SelectionRule(np.reshape(sel, sel_shape))
        if beta.is_obedient(game):
            continue
        for pol in itertools.product(range(game.n_actions), repeat=int(np.prod(pol_shape))):
            yield beta, Policy.deterministic(game, np.reshape(pol, pol_shape))


def find_selective_pbme(game, alpha, tol=1e-6, budget=256):
    """First non-obedient pure PBME in enumeration order within `budget` checks, or None."""
    for beta, pi in itertools.islice(pure_profiles(game), budget):
        if eqm.check_pbme(game, alpha, beta, pi, None, tol).is_equilibrium:
            return beta, pi
    return None


def selective_instances(count, seed, signal_dependent=False, max_tries=1000):
    """Random two-source games paired with a non-obedient PBME found by brute force."""
    rng = np.random.default_rng(seed)
    out = []
    for trial in range(max_tries):
        n, G, K = SELECTIVE_SHAPES[trial % len(SELECTIVE_SHAPES)]
        game = gen.random_game(rng, n_agents=n, n_states=G, n_actions=2, n_signals=2, n_types=K,
                               n_sources=2, gamma=0.5, signal_dependent=signal_dependent)
        alpha = gen.random_signaling_rule(rng, game)
        found = find_selective_pbme(game, alpha)
        if found is not None:
            out.append((game, alpha) + found)
            if len(out) == count:
                break
    return out


# ---------------------------------------------------------------------------
# static correlated-equilibrium probes

def bmce_vertex(game, rng):
    """Vertex of the static correlated-equilibrium polytope in a random direction."""
    from markov_infodesign import design as dsg
    from markov_infodesign.lp import LinearProgram, solve_lp
    flat = np.full((game.n_states, game.n_joint_types, game.n_joint_actions), 1.0 / game.n_joint_actions)
    base = dsg._goal_lp(game, flat)
    lp = LinearProgram(rng.normal(size=base.n_vars), base.A_eq, base.b_eq, base.A_ub, base.b_ub)
    return dsg._kappa_from_y(game, solve_lp(lp).x).table


def goal_probe(game, rng, n=200):
    """Random goals, equilibrium vertices, interior blends and near-boundary blends."""
    goals = []
    for j in range(n):
        kind = j % 4
        if kind == 0:
            goals.append(gen.random_goal(rng, game).table)
        elif kind == 1:
            goals.append(bmce_vertex(game, rng))
        elif kind == 2:
            lam = rng.uniform()
            goals.append(lam * bmce_vertex(game, rng) + (1 - lam) * bmce_vertex(game, rng))
        else:
            lam = rng.uniform(0, 0.02)
            goals.append((1 - lam) * bmce_vertex(game, rng) + lam * gen.random_goal(rng, game).table)
    return goals
