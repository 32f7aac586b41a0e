"""Seeded Monte-Carlo rollouts of the augmented game.

Every random choice is an inverse-CDF draw from a pre-generated uniform, so
two profiles simulated from the same seed share their random numbers.
Rollouts are generated in fixed-size chunks, each with its own jumped Philox
stream, which makes results independent of chunking across workers.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import dynamics as dyn
from .equilibrium import _replace_component, _selected_profiles
from .game_core import GameSpec, Policy, SelectionRule, SignalingRule

CHUNK = 8192
GENERATOR = "numpy.random.Philox (counter-based, 64-bit key), stream jumped per chunk"
WORKERS_ENV = "INFODESIGN_WORKERS"
DRAWS_PER_PERIOD = 4


def default_horizon(game: GameSpec, tail: float = 1e-6) -> int:
    """Smallest T with gamma**T * R_max / (1 - gamma) < tail."""
    if game.gamma == 0.0:
        return 1
    rmax = max(game.reward_bound, 1e-300)
    T = math.ceil(math.log(tail * (1 - game.gamma) / rmax) / math.log(game.gamma))
    T = max(T, 1)
    while game.gamma ** T * rmax / (1 - game.gamma) >= tail:
        T += 1
    return T


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True, eq=False)
class TrajectoryBatch:
    """Per-rollout, per-period records; arrays have leading shape (N,) or (N, T)."""

    seed: int
    horizon: int
    joint_types: np.ndarray       # (N,)
    states: np.ndarray            # (N, T)
    principal: np.ndarray         # (N, T) principal signal profile
    nonprincipal: np.ndarray      # (N, T) non-principal draw index
    selected: np.ndarray          # (N, T) selected signal profile
    actions: np.ndarray           # (N, T) joint action
    rewards: np.ndarray           # (N, T, n)

    def __len__(self):
        return len(self.joint_types)

    def discounted_returns(self, gamma: float) -> np.ndarray:
        disc = gamma ** np.arange(self.horizon)
        return np.einsum("ntj,t->nj", self.rewards, disc)

    def __getitem__(self, k):
        sl = slice(k, k + 1) if isinstance(k, (int, np.integer)) else k
        return TrajectoryBatch(self.seed, self.horizon, self.joint_types[sl], self.states[sl],
                               self.principal[sl], self.nonprincipal[sl], self.selected[sl],
                               self.actions[sl], self.rewards[sl])


Trajectory = TrajectoryBatch


def _inverse_cdf(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs, axis=-1)
    idx = (cdf < u[:, None] * cdf[:, -1:]).sum(axis=-1)
    return np.minimum(idx, probs.shape[-1] - 1)


def _uniforms(seed: int, chunk_index: int, size: int, horizon: int) -> np.ndarray:
    bitgen = np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF).jumped(chunk_index)
    return np.random.Generator(bitgen).random((size, 2 + DRAWS_PER_PERIOD * horizon))


def _simulate(game: GameSpec, alpha: SignalingRule, beta: SelectionRule, pi: Policy,
              U: np.ndarray, horizon: int):
    N = U.shape[0]
    sel = _selected_profiles(game, beta)                              # (G, T, SP, W)
    pj = pi.joint(game)                                               # (G, SP, T, AJ)
    sp, jt = game.signal_profile_table, game.joint_type_table
    types = _inverse_cdf(np.broadcast_to(game.joint_type_prior(), (N, jt.shape[0])), U[:, 0])
    g = _inverse_cdf(np.broadcast_to(game.state_init, (N, game.n_states)), U[:, 1])
    out = {k: np.empty((N, horizon), dtype=np.int64)
           for k in ("states", "principal", "nonprincipal", "selected", "actions")}
    rewards = np.empty((N, horizon, game.n_agents))
    for t in range(horizon):
        u = U[:, 2 + DRAWS_PER_PERIOD * t: 2 + DRAWS_PER_PERIOD * (t + 1)]
        wk = _inverse_cdf(alpha.table[g, types], u[:, 0])
        w = _inverse_cdf(np.broadcast_to(game.nonprincipal_dist, (N, len(game.nonprincipal_dist))), u[:, 1])
        s = sel[g, types, wk, w]
        a = _inverse_cdf(pj[g, s, types], u[:, 2])
        for i in range(game.n_agents):
            rewards[:, t, i] = game.rewards[i, a, g, sp[s, i], jt[types, i]]
        out["states"][:, t] = g
        out["principal"][:, t] = wk
        out["nonprincipal"][:, t] = w
        out["selected"][:, t] = s
        out["actions"][:, t] = a
        g = _inverse_cdf(game.transition[g, a], u[:, 3])
    return types, out, rewards


def simulate(game: GameSpec, alpha: SignalingRule, beta: SelectionRule, pi: Policy,
             n_rollouts: int, horizon: int | None = None, seed: int = 0,
             workers: int | None = None) -> TrajectoryBatch:
    """n_rollouts independent episodes; types redrawn per episode."""
    if n_rollouts < 1:
        raise ValueError("n_rollouts must be positive")
    horizon = default_horizon(game) if horizon is None else int(horizon)
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    sizes = [min(CHUNK, n_rollouts - c * CHUNK) for c in range(math.ceil(n_rollouts / CHUNK))]

    def run(c):
        return _simulate(game, alpha, beta, pi, _uniforms(seed, c, sizes[c], horizon), horizon)

    workers = worker_count() if workers is None else workers
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(c) for c in range(len(sizes))]
    cat = {k: np.concatenate([p[1][k] for p in parts]) for k in parts[0][1]}
    return TrajectoryBatch(seed=seed, horizon=horizon,
                           joint_types=np.concatenate([p[0] for p in parts]),
                           rewards=np.concatenate([p[2] for p in parts]), **cat)


def rollout(game: GameSpec, alpha: SignalingRule, beta: SelectionRule, pi: Policy,
            T: int, seed: int) -> TrajectoryBatch:
    """A single episode of length T."""
    if T < 1:
        raise ValueError("T must be at least 1")
    return simulate(game, alpha, beta, pi, 1, T, seed, workers=1)


def estimate_occupancy(trajectories: TrajectoryBatch, gamma: float, game: GameSpec):
    """Discounted cell counts per joint type, normalized by that type's episode count.

    Returns (OccupancyMeasure, episodes per joint type).
    """
    if trajectories is None or len(trajectories) == 0:
        raise ValueError("insufficient data: no trajectories")
    T, G = game.n_joint_types, game.n_states
    AJ, SP = game.n_joint_actions, game.n_signal_profiles
    shape = (T, G, AJ, SP, SP)
    disc = np.broadcast_to(gamma ** np.arange(trajectories.horizon), trajectories.states.shape)
    types = np.broadcast_to(trajectories.joint_types[:, None], trajectories.states.shape)
    flat = np.ravel_multi_index((types, trajectories.states, trajectories.actions,
                                 trajectories.selected, trajectories.principal), shape)
    table = np.bincount(flat.ravel(), weights=disc.ravel(), minlength=int(np.prod(shape))).reshape(shape)
    counts = np.bincount(trajectories.joint_types, minlength=T).astype(float)
    table = table / np.where(counts > 0, counts, 1.0)[:, None, None, None, None]
    return dyn.OccupancyMeasure(table, gamma), counts


def deviating_profile(game: GameSpec, beta: SelectionRule, pi: Policy, agent: int,
                      policy_table=None, selection_table=None):
    """Replace one agent's policy (G, S, K actions) and/or selection (G, S**m, K positions)."""
    if selection_table is not None:
        beta = beta.with_agent(agent, np.asarray(selection_table))
    if policy_table is not None:
        table = np.asarray(policy_table, dtype=np.int64)
        if pi.correlated:
            pj = pi.joint(game)
            repl = _replace_component(game, agent)
            others = pj[..., repl].sum(axis=-1)                       # (G, SP, T, AJ)
            sp, jt, ja = game.signal_profile_table, game.joint_type_table, game.joint_action_table
            chosen = table[:, sp[:, agent]][:, :, jt[:, agent]]       # (G, SP, T)
            onehot = (ja[:, agent][None, None, None, :] == chosen[..., None])
            pi = Policy(others * onehot, correlated=True)
        else:
            own = np.zeros(table.shape + (game.n_actions,))
            np.put_along_axis(own, table[..., None], 1.0, axis=-1)
            pi = pi.with_agent(agent, own)
    return beta, pi


def empirical_deviation_gain(game: GameSpec, alpha: SignalingRule, beta: SelectionRule, pi: Policy,
                             deviation: dict, n_rollouts: int, T: int | None = None, seed: int = 0):
    """Paired-seed estimate of deviating-minus-equilibrium discounted payoff.

    deviation: {"agent": i, "policy": table or None, "selection": table or None}.
    Returns (mean gain, standard error).
    """
    agent = int(deviation["agent"])
    beta_d, pi_d = deviating_profile(game, beta, pi, agent, deviation.get("policy"),
                                     deviation.get("selection"))
    eq = simulate(game, alpha, beta, pi, n_rollouts, T, seed)
    dv = simulate(game, alpha, beta_d, pi_d, n_rollouts, T, seed)
    diff = dv.discounted_returns(game.gamma)[:, agent] - eq.discounted_returns(game.gamma)[:, agent]
    se = float(diff.std(ddof=1) / math.sqrt(len(diff))) if len(diff) > 1 else 0.0
    return float(diff.mean()), se


def to_jsonl(game: GameSpec, trajectories: TrajectoryBatch) -> str:
    """One JSON object per period, episode-major."""
    lines = []
    sp, jt, ja = game.signal_profile_table, game.joint_type_table, game.joint_action_table
    npt = game.nonprincipal_table
    for e in range(len(trajectories)):
        t_lab = [game.types[k] for k in jt[trajectories.joint_types[e]]]
        for t in range(trajectories.horizon):
            rec = {
                "episode": e, "period": t, "types": t_lab,
                "state": game.states[trajectories.states[e, t]],
                "principal_signals": [game.signals[s] for s in sp[trajectories.principal[e, t]]],
                "other_signals": [[game.signals[s] for s in row] for row in npt[trajectories.nonprincipal[e, t]]],
                "selected_signals": [game.signals[s] for s in sp[trajectories.selected[e, t]]],
                "actions": [game.actions[a] for a in ja[trajectories.actions[e, t]]],
                "rewards": [float(r) for r in trajectories.rewards[e, t]],
            }
            lines.append(json.dumps(rec, sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")
