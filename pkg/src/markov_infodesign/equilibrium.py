"""Brute-force equilibrium verification and slack certificates.

One-shot deviations are evaluated at an agent's information set
(state, received batch, own type, recommended own action). Opponents'
actions keep their equilibrium conditional law; continuation values are the
equilibrium state values of each joint type, averaged under the Bayes
posterior of the information set.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import dynamics as dyn
from .game_core import (DEFAULT_DEVIATION_CAP, BeliefSystem, GameSpec, Goal, Policy,
                        SelectionRule, SignalingRule, count_deviations,
                        policy_deviation_array, selection_deviation_array)

DEFAULT_TOL = 1e-6
SUPPORT_TOL = 1e-9


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


@dataclass(frozen=True)
class EquilibriumReport:
    is_equilibrium: bool
    worst_policy_gain: float
    worst_selection_gain: float
    witness: dict | None
    tol: float
    belief_consistent: bool = True
    obedient: bool | None = None
    admissible: bool | None = None
    admissibility_gap: float | None = None
    compound_gains: tuple = ()
    kind: str = "pbme"

    def to_dict(self):
        return _jsonable({
            "kind": self.kind,
            "is_equilibrium": self.is_equilibrium,
            "worst_policy_gain": self.worst_policy_gain,
            "worst_selection_gain": self.worst_selection_gain,
            "witness": self.witness,
            "tol": self.tol,
            "belief_consistent": self.belief_consistent,
            "obedient": self.obedient,
            "admissible": self.admissible,
            "admissibility_gap": self.admissibility_gap,
            "compound_gains": list(self.compound_gains),
        })

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


# ---------------------------------------------------------------------------
# information-set machinery

def _selected_profiles(game: GameSpec, beta: SelectionRule) -> np.ndarray:
    """Selected signal profile per (g, joint type, principal profile, non-principal draw)."""
    n = game.n_agents
    jt = game.joint_type_table
    batches = game.agent_batches()
    bt = game.batch_table
    weights = game.n_signals ** np.arange(n - 1, -1, -1)
    out = np.zeros((game.n_states, jt.shape[0]) + batches.shape[:2], dtype=np.int64)
    for i in range(n):
        b = batches[:, :, i]                                          # (S**n, W)
        pos = beta.table[i][:, b][:, :, :, jt[:, i]]                  # (G, S**n, W, K**n)
        pos = np.transpose(pos, (0, 3, 1, 2))
        out += bt[b[None, None], pos] * weights[i]
    return out


def outcome_law(game: GameSpec, alpha: SignalingRule, beta: SelectionRule, pi: Policy) -> np.ndarray:
    """P(joint type, principal profile, non-principal draw, joint action | g) times nothing else.

    Shape (G, K**n, S**n, W, A**n); includes the joint type prior.
    """
    sel = _selected_profiles(game, beta)                              # (G, T, S**n, W)
    pj = pi.joint(game)                                               # (G, S**n, T, A**n)
    G, T = sel.shape[:2]
    g_idx = np.arange(G)[:, None, None, None]
    t_idx = np.arange(T)[None, :, None, None]
    act = pj[g_idx, sel, t_idx]                                       # (G, T, S**n, W, A**n)
    w = (game.joint_type_prior()[None, :, None, None] * alpha.table[:, :, :, None]
         * game.nonprincipal_dist[None, None, None, :])
    return w[..., None] * act


def _replace_component(game: GameSpec, agent: int) -> np.ndarray:
    """Joint action index with agent's component replaced, shape (A**n, A)."""
    ja = game.joint_action_table
    A, n = game.n_actions, game.n_agents
    stride = A ** (n - 1 - agent)
    base = np.arange(ja.shape[0]) - ja[:, agent] * stride
    return base[:, None] + np.arange(A)[None, :] * stride


@dataclass
class InfoSetValues:
    """Per-agent aggregated values at information sets.

    keys index (g, batch, own type, own recommended action) in C order.
    `mass` is the probability of the key given (g, own type);
    `dev` holds conditional expected Q for each (position, action).
    """

    mass: np.ndarray          # (G, B, K, A)
    dev: np.ndarray           # (G, B, K, A, m, A)
    eq: np.ndarray            # (G, B, K, A)
    position: np.ndarray      # (G, B, K) equilibrium position


def info_set_values(game: GameSpec, law: np.ndarray, beta: SelectionRule, q_table: np.ndarray,
                    agent: int) -> InfoSetValues:
    """Aggregate Q for every one-shot deviation at every information set.

    q_table has shape (K**n, G, S, A**n) and already includes continuation values.
    """
    G, T, SP, W, AJ = law.shape
    K, A, m, S = game.n_types, game.n_actions, game.n_sources, game.n_signals
    B = game.n_batches
    i = agent
    batch = game.agent_batches()[:, :, i]                             # (SP, W)
    own_t = game.joint_type_table[:, i]
    own_a = game.joint_action_table[:, i]
    repl = _replace_component(game, i)                                # (AJ, A)
    bt = game.batch_table

    key = (((np.arange(G)[:, None, None, None, None] * B + batch[None, None, :, :, None]) * K
            + own_t[None, :, None, None, None]) * A + own_a[None, None, None, None, :])
    key = np.broadcast_to(key, law.shape).ravel()
    flat = law.ravel()
    n_keys = G * B * K * A
    mass = np.bincount(key, weights=flat, minlength=n_keys)

    dev = np.zeros((n_keys, m, A))
    g_idx = np.arange(G)[:, None, None, None, None]
    t_idx = np.arange(T)[None, :, None, None, None]
    for pos in range(m):
        sig = bt[batch, pos][None, None, :, :, None]                  # selected value at this position
        for a2 in range(A):
            a_new = repl[:, a2][None, None, None, None, :]
            q = q_table[t_idx, g_idx, sig, a_new]
            dev[:, pos, a2] = np.bincount(key, weights=(flat * np.broadcast_to(q, law.shape).ravel()),
                                          minlength=n_keys)
    with np.errstate(invalid="ignore", divide="ignore"):
        dev = np.where(mass[:, None, None] > 0, dev / np.where(mass > 0, mass, 1.0)[:, None, None], 0.0)
    mass = mass.reshape(G, B, K, A)
    # condition on (g, own type)
    z = mass.sum(axis=(1, 3), keepdims=True)
    cond = np.where(z > 0, mass / np.where(z > 0, z, 1.0), 0.0)
    dev = dev.reshape(G, B, K, A, m, A)
    position = beta.table[i]                                          # (G, B, K)
    gi, bi, ki, ai = np.indices((G, B, K, A), sparse=True)
    eq = dev[gi, bi, ki, ai, position[gi, bi, ki], ai]
    return InfoSetValues(mass=cond, dev=dev, eq=eq, position=position)


def _gains(info: InfoSetValues):
    """Policy and selection gains per information set, -inf off support."""
    on = info.mass > SUPPORT_TOL
    m = info.dev.shape[4]
    gi, bi, ki, ai = np.indices(info.mass.shape, sparse=True)
    same = info.dev[gi, bi, ki, ai, info.position[gi, bi, ki]]          # (G, B, K, A, A)
    pol = same.max(axis=-1) - info.eq
    if m > 1:
        other = np.arange(m)[None, None, None, :] != info.position[..., None]
        alt = np.where(other[:, :, :, None, :, None], info.dev, -np.inf)
        sel = alt.max(axis=(4, 5)) - info.eq
    else:
        sel = np.full(pol.shape, -np.inf)
    return np.where(on, pol, -np.inf), np.where(on, sel, -np.inf)


def _witness(game, agent, kind, info, gains):
    idx = np.unravel_index(int(np.argmax(gains)), gains.shape)
    g, b, k, a = (int(v) for v in idx)
    if kind == "policy":
        pos = int(info.position[g, b, k])
        a2 = int(np.argmax(info.dev[g, b, k, a, pos]))
    else:
        alt = info.dev[g, b, k, a].copy()
        alt[int(info.position[g, b, k])] = -np.inf
        pos, a2 = (int(v) for v in np.unravel_index(int(np.argmax(alt)), alt.shape))
    batch = [game.signals[s] for s in game.batch_table[b]]
    return {
        "agent": agent, "kind": kind, "state": game.states[g], "batch": batch,
        "type": game.types[k], "recommended_action": game.actions[a],
        "deviation": {"position": pos, "action": game.actions[a2]},
        "gain": float(gains[idx]),
    }


def _q_for_agent(game, values: dyn.ValueBundle, agent):
    return values.Q[agent]                                            # (K**n, G, S, A**n)


def beliefs_consistent(game: GameSpec, alpha: SignalingRule, mu: BeliefSystem | None,
                       tol: float = 1e-9) -> bool:
    if mu is None:
        return True
    ref = dyn.update_beliefs(game, alpha)
    if mu.table.shape != ref.table.shape:
        return False
    on = ~ref.fallback
    diff = np.abs(mu.table - ref.table)[on]
    return bool(diff.size == 0 or diff.max() <= tol)


def one_shot_gains(game: GameSpec, alpha: SignalingRule, beta: SelectionRule, pi: Policy,
                   values: dyn.ValueBundle | None = None):
    """Per-agent (InfoSetValues, policy gains, selection gains)."""
    if values is None:
        values = dyn.compute_values(game, alpha, beta, pi, tol=1e-11)
    law = outcome_law(game, alpha, beta, pi)
    out = []
    for i in range(game.n_agents):
        info = info_set_values(game, law, beta, _q_for_agent(game, values, i), i)
        pol, sel = _gains(info)
        out.append((info, pol, sel))
    return out


def _worst(per_agent, game, kind_index):
    worst, witness = -np.inf, None
    kind = ("policy", "selection")[kind_index]
    for i, (info, pol, sel) in enumerate(per_agent):
        gains = (pol, sel)[kind_index]
        if gains.size and np.isfinite(gains).any():
            top = float(np.max(gains))
            if top > worst:
                worst, witness = top, _witness(game, i, kind, info, gains)
    return worst, witness


def _report_from_gains(game, per_agent, tol, **extra):
    wp, wit_p = _worst(per_agent, game, 0)
    ws, wit_s = _worst(per_agent, game, 1)
    wp = 0.0 if not np.isfinite(wp) else wp
    ws = 0.0 if not np.isfinite(ws) else ws
    witness = wit_p if wp >= ws else wit_s
    if max(wp, ws) <= tol:
        witness = None
    ok = max(wp, ws) <= tol and extra.get("belief_consistent", True)
    for flag in ("obedient", "admissible"):
        if extra.get(flag) is False:
            ok = False
    if any(g > tol for g in extra.get("compound_gains", ())):
        ok = False
    return EquilibriumReport(is_equilibrium=bool(ok), worst_policy_gain=float(wp),
                             worst_selection_gain=float(ws), witness=witness, tol=tol, **extra)


def check_pbme(game: GameSpec, alpha: SignalingRule, beta: SelectionRule, pi: Policy,
               mu: BeliefSystem | None = None, tol: float = DEFAULT_TOL,
               values: dyn.ValueBundle | None = None) -> EquilibriumReport:
    """One-shot deviation test of a stationary profile."""
    per_agent = one_shot_gains(game, alpha, beta, pi, values)
    return _report_from_gains(game, per_agent, tol,
                              belief_consistent=beliefs_consistent(game, alpha, mu))


def check_obedient(beta: SelectionRule, game: GameSpec) -> bool:
    return beta.is_obedient(game)


def induced_action_marginal(game: GameSpec, alpha: SignalingRule, beta: SelectionRule,
                            pi: Policy) -> np.ndarray:
    """P(joint action | g, joint type) under the profile, shape (G, K**n, A**n)."""
    return dyn.profile_distribution(game, alpha, beta, pi).sum(axis=(2, 3))


def check_admissibility(game: GameSpec, alpha: SignalingRule, beta: SelectionRule, pi: Policy,
                        kappa: Goal, tol: float = DEFAULT_TOL):
    """(admissible, max absolute gap) between the induced action marginal and the goal."""
    gap = float(np.max(np.abs(induced_action_marginal(game, alpha, beta, pi) - kappa.table)))
    return gap <= tol, gap


def compound_gains(game: GameSpec, alpha: SignalingRule, beta: SelectionRule, pi: Policy,
                   values: dyn.ValueBundle, t_dev: int = 2):
    """Best gain of deviating for L consecutive periods then reverting, L = 1..t_dev.

    The deviation picks the best (position, action) at each information set
    against the continuation of the previous round; gains are interim at
    (g, own type), averaged over others' types under the prior.
    """
    law = outcome_law(game, alpha, beta, pi)                          # (G, T, SP, W, AJ)
    G, T = law.shape[:2]
    jt = game.joint_type_table
    prior = game.joint_type_prior()
    rt = dyn._reward_tensor(game)
    out = []
    for i in range(game.n_agents):
        cont = values.J[i].copy()                                     # (T, G)
        gains_i = []
        for _ in range(t_dev):
            q = _q_with_continuation(game, rt, cont, i)
            info = info_set_values(game, law, beta, q, i)
            # chosen deviation per information set: best (position, action)
            flat = info.dev.reshape(info.dev.shape[:4] + (-1,))
            choice = np.argmax(flat, axis=-1)                         # (G, B, K, A)
            cont = _value_of_choice(game, law, q, choice, i)
            gap = cont - values.J[i]                                  # (T, G)
            interim = np.zeros((game.n_types, G))
            w = np.zeros(game.n_types)
            np.add.at(interim, jt[:, i], prior[:, None] * gap)
            np.add.at(w, jt[:, i], prior)
            interim = interim / np.where(w > 0, w, 1.0)[:, None]
            gains_i.append(float(interim.max()))
        out.append(gains_i)
    return tuple(max(col) for col in zip(*out)) if out else ()


def _q_with_continuation(game, rt, cont, agent):
    """Q table (K**n, G, S, A**n) for one agent with continuation `cont` (K**n, G)."""
    sp = game.signal_profile_table
    reps = np.array([int(np.flatnonzero(sp[:, agent] == s)[0]) for s in range(game.n_signals)])
    base = np.transpose(rt[agent][:, :, reps, :], (1, 0, 2, 3))       # (T, G, S, AJ)
    nxt = np.einsum("gah,th->tga", game.transition, cont)
    return base + game.gamma * nxt[:, :, None, :]


def _value_of_choice(game, law, q, choice, agent):
    """State value (K**n, G) when the agent plays `choice` at every information set."""
    G, T, SP, W, AJ = law.shape
    K, A, m, B = game.n_types, game.n_actions, game.n_sources, game.n_batches
    batch = game.agent_batches()[:, :, agent]
    own_t = game.joint_type_table[:, agent]
    own_a = game.joint_action_table[:, agent]
    gi = np.arange(G)[:, None, None, None, None]
    ti = np.arange(T)[None, :, None, None, None]
    c = choice[gi, batch[None, None, :, :, None], own_t[None, :, None, None, None],
               own_a[None, None, None, None, :]]
    pos, a2 = c // A, c % A
    sig = game.batch_table[batch[None, None, :, :, None], pos]
    a_new = _replace_component(game, agent)[np.arange(AJ)[None, None, None, None, :], a2]
    val = q[ti, gi, sig, a_new]
    total = (law * val).sum(axis=(2, 3, 4))                           # (G, T)
    z = law.sum(axis=(2, 3, 4))
    return (total / np.where(z > 0, z, 1.0)).T


def check_o_pbme(game: GameSpec, alpha: SignalingRule, beta: SelectionRule, pi: Policy,
                 mu: BeliefSystem | None, kappa: Goal | None, tol: float = DEFAULT_TOL,
                 t_dev: int = 2, values: dyn.ValueBundle | None = None) -> EquilibriumReport:
    """PBME test plus obedience, admissibility and a windowed multi-period test."""
    if values is None:
        values = dyn.compute_values(game, alpha, beta, pi, tol=1e-11)
    per_agent = one_shot_gains(game, alpha, beta, pi, values)
    if kappa is not None:
        admissible, gap = check_admissibility(game, alpha, beta, pi, kappa, tol)
    else:
        admissible, gap = None, None
    comp = compound_gains(game, alpha, beta, pi, values, t_dev) if t_dev > 0 else ()
    return _report_from_gains(game, per_agent, tol, kind="o-pbme",
                              belief_consistent=beliefs_consistent(game, alpha, mu),
                              obedient=check_obedient(beta, game), admissible=admissible,
                              admissibility_gap=gap, compound_gains=comp)


def check_bme(game: GameSpec, pi: Policy, mu: BeliefSystem | None = None,
              tol: float = DEFAULT_TOL) -> EquilibriumReport:
    """Bayesian Markov Nash check for the signal-free game.

    The principal sends the first signal profile with certainty and agents
    obey, so only types carry private information; rewards are read at the
    first signal. `pi` is an independent policy indexed by that signal.
    """
    alpha = SignalingRule.constant(game, 0)
    beta = SelectionRule.obedient(game)
    rep = check_pbme(game, alpha, beta, pi, mu, tol)
    return EquilibriumReport(**{**rep.__dict__, "kind": "bme"})


def goal_as_policy(game: GameSpec, kappa: Goal) -> Policy:
    """Correlated policy that plays the goal's conditional regardless of the signals."""
    tab = np.broadcast_to(kappa.table[:, None, :, :],
                          (game.n_states, game.n_signal_profiles, game.n_joint_types, game.n_joint_actions))
    return Policy(np.array(tab), correlated=True)


def check_bmce(game: GameSpec, kappa: Goal, tol: float = DEFAULT_TOL) -> EquilibriumReport:
    """Bayesian Markov correlated equilibrium check of a goal.

    Recommendations are drawn from kappa; each agent sees its own action
    recommendation, the state and its type. Rewards are read at the first
    signal, which is exact when rewards do not depend on signals.
    """
    alpha = SignalingRule.constant(game, 0)
    beta = SelectionRule.obedient(game)
    rep = check_pbme(game, alpha, beta, goal_as_policy(game, kappa), None, tol)
    return EquilibriumReport(**{**rep.__dict__, "kind": "bmce"})


# ---------------------------------------------------------------------------
# slack certificates

@dataclass(frozen=True, eq=False)
class SlackCertificate:
    """Ex-ante slacks of every enumerated deviation.

    delta[i] has one entry per policy deviation table of agent i, zeta[i] one
    per selection deviation table. Dual weights are the deviating profiles'
    occupancy over (joint type, g, joint action, principal profile), weighted
    by the joint type prior.
    """

    delta: tuple
    zeta: tuple
    policy_duals: tuple
    selection_duals: tuple
    lagrangian_value: float

    @property
    def min_delta(self) -> float:
        vals = [float(d.min()) for d in self.delta if d.size]
        return min(vals) if vals else 0.0

    @property
    def min_zeta(self) -> float:
        vals = [float(z.min()) for z in self.zeta if z.size]
        return min(vals) if vals else 0.0

    def min_slack(self) -> float:
        return min(self.min_delta, self.min_zeta)

    def to_dict(self, include_duals: bool = False):
        out = {
            "delta": [d.tolist() for d in self.delta],
            "zeta": [z.tolist() for z in self.zeta],
            "min_delta": self.min_delta,
            "min_zeta": self.min_zeta,
            "lagrangian_value": self.lagrangian_value,
        }
        if include_duals:
            out["policy_duals"] = [d.tolist() for d in self.policy_duals]
            out["selection_duals"] = [d.tolist() for d in self.selection_duals]
        return _jsonable(out)


def _others_policy(game: GameSpec, pi: Policy, agent: int) -> np.ndarray:
    """Opponents' joint law with the agent's own component summed out, (G, S**n, K**n, A**n)."""
    pj = pi.joint(game)
    repl = _replace_component(game, agent)
    return pj[..., repl].sum(axis=-1)


def _stacked_values(game, laws, agent):
    """Per-deviation J for one agent and state-action-signal occupancy.

    laws: (D, G, T, SPk, SPsel, AJ). Returns J (D, T, G) and occupancy (D, T, G, AJ, SPsel).
    """
    D, G, T = laws.shape[:3]
    act = laws.sum(axis=(3, 4))                                       # (D, G, T, AJ)
    P = np.einsum("dgta,gah->dtgh", act, game.transition)             # (D, T, G, G)
    rt = dyn._reward_tensor(game)[agent]                              # (G, T, SP, AJ)
    r = np.einsum("dgtkwa,gtwa->dtg", laws, rt)
    eye = np.eye(G)
    J = np.linalg.solve(eye[None, None] - game.gamma * P, r[..., None])[..., 0]
    nu = np.linalg.solve(np.swapaxes(eye[None, None] - game.gamma * P, -1, -2),
                         np.broadcast_to(game.state_init, (D, T, G))[..., None])[..., 0]
    occ = nu[:, :, :, None, None] * np.transpose(laws.sum(axis=3), (0, 2, 1, 4, 3))
    return J, occ


def compute_slacks(game: GameSpec, alpha: SignalingRule, beta: SelectionRule, pi: Policy,
                   mu: BeliefSystem | None = None, deviations=None,
                   cap: int = DEFAULT_DEVIATION_CAP, chunk: int = 4096) -> SlackCertificate:
    """delta and zeta for every deviation; deviations maps agent -> (policy stack, selection stack).

    Policy stacks have shape (D, G, S, K) of actions, selection stacks (D, G, S**m, K)
    of positions. By default every deterministic table is enumerated.
    """
    prior = game.joint_type_prior()
    d0 = game.state_init
    law = dyn.profile_distribution(game, alpha, beta, pi)             # (G, T, SPk, SPsel, AJ)
    J_eq = dyn.direct_state_values(game, law)                         # (n, T, G)
    sel = dyn.selection_kernel(game, beta)
    sp, jt, ja = game.signal_profile_table, game.joint_type_table, game.joint_action_table
    deltas, zetas, pduals, sduals = [], [], [], []
    lagrangian = 0.0
    for i in range(game.n_agents):
        if deviations is not None:
            pol_devs, sel_devs = deviations[i]
        else:
            pol_devs = policy_deviation_array(game, cap)
            sel_devs = selection_deviation_array(game, cap) if game.n_sources > 1 else \
                np.zeros((0, game.n_states, game.n_batches, game.n_types), dtype=np.int64)
        pol_devs = np.asarray(pol_devs, dtype=np.int64)
        sel_devs = np.asarray(sel_devs, dtype=np.int64)
        eq_exante = float(prior @ J_eq[i] @ d0)

        others = _others_policy(game, pi, i)                          # (G, SPsel, T, AJ)
        others = np.transpose(others, (0, 2, 1, 3))                   # (G, T, SPsel, AJ)
        delta = np.empty(len(pol_devs))
        pdual = np.empty((len(pol_devs), game.n_joint_types, game.n_states, game.n_joint_actions,
                          game.n_signal_profiles))
        for start in range(0, len(pol_devs), chunk):
            devs = pol_devs[start:start + chunk]
            # chosen action per (D, g, joint type, selected profile)
            chosen = devs[:, :, sp[:, i]][:, :, :, jt[:, i]]          # (D, G, SPsel, T)
            chosen = np.transpose(chosen, (0, 1, 3, 2))
            onehot = (ja[:, i][None, None, None, None, :] == chosen[..., None]).astype(float)
            pol = others[None] * onehot                               # (D, G, T, SPsel, AJ)
            laws = (alpha.table[None, :, :, :, None, None] * sel[None, :, :, :, :, None]
                    * pol[:, :, :, None, :, :])
            J_dev, occ = _stacked_values(game, laws, i)
            delta[start:start + len(devs)] = eq_exante - np.einsum("t,dtg,g->d", prior, J_dev, d0)
            pdual[start:start + len(devs)] = prior[None, :, None, None, None] * occ
        zeta = np.empty(len(sel_devs))
        sdual = np.empty((len(sel_devs),) + pdual.shape[1:])
        pol_eq = np.transpose(pi.joint(game), (0, 2, 1, 3))           # (G, T, SPsel, AJ)
        for start in range(0, len(sel_devs), chunk):
            devs = sel_devs[start:start + chunk]
            sels = np.stack([dyn.selection_kernel(game, beta.with_agent(i, d)) for d in devs])
            laws = (alpha.table[None, :, :, :, None, None] * sels[..., None]
                    * pol_eq[None, :, :, None, :, :])
            J_dev, occ = _stacked_values(game, laws, i)
            zeta[start:start + len(devs)] = eq_exante - np.einsum("t,dtg,g->d", prior, J_dev, d0)
            sdual[start:start + len(devs)] = prior[None, :, None, None, None] * occ
        # Lagrangian: dual-weighted residual of the binding constraints, with the
        # deviating payoff read from the dual occupancy rather than the value side
        rt = np.transpose(dyn._reward_tensor(game)[i], (1, 0, 3, 2))  # (T, G, AJ, SPsel)
        for slack, dual in ((delta, pdual), (zeta, sdual)):
            if len(slack):
                weight = dual.sum(axis=(1, 2, 3, 4))
                payoff = np.einsum("dtgaw,tgaw->d", dual, rt)
                lagrangian += float(weight @ (slack - eq_exante + payoff))
        deltas.append(delta)
        zetas.append(zeta)
        pduals.append(pdual)
        sduals.append(sdual)
    return SlackCertificate(tuple(deltas), tuple(zetas), tuple(pduals), tuple(sduals), lagrangian)
