"""Induced dynamics, value functions and occupancy measures.

Everything here is exact tabular computation. Tables indexed by joint type
carry a leading axis of size K**n; per-agent tables carry a leading agent axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .game_core import (BeliefSystem, GameSpec, Goal, Policy, SelectionRule,
                        SignalingRule, joint_profiles)

ZERO_MASS = 1e-12


class ConvergenceError(RuntimeError):
    pass


class SequenceCapError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# per-period distributions

def selection_kernel(game: GameSpec, beta: SelectionRule) -> np.ndarray:
    """P(selected profile | g, joint type, principal profile), shape (G, K**n, S**n, S**n).

    Non-principal signals are integrated out under their fixed distribution.
    """
    key = ("sel", id(beta))
    G, n = game.n_states, game.n_agents
    sp_n = game.n_signal_profiles
    jt = game.joint_type_table
    batches = game.agent_batches()                    # (S**n, W, n)
    bt = game.batch_table                              # (S**m, m)
    pw = game.nonprincipal_dist                        # (W,)
    weights = game.n_signals ** np.arange(n - 1, -1, -1)
    out = np.zeros((G, jt.shape[0], sp_n, sp_n))
    rows = np.broadcast_to(np.arange(sp_n)[:, None], batches.shape[:2])
    probs = np.broadcast_to(pw[None, :], batches.shape[:2])
    for g in range(G):
        for t in range(jt.shape[0]):
            chosen = np.zeros(batches.shape[:2], dtype=np.int64)
            for i in range(n):
                b = batches[:, :, i]
                pos = beta.table[i, g, b, jt[t, i]]
                chosen += bt[b, pos] * weights[i]
            np.add.at(out[g, t], (rows, chosen), probs)
    return out


def profile_distribution(game: GameSpec, alpha: SignalingRule, beta: SelectionRule,
                         pi: Policy) -> np.ndarray:
    """Joint per-period law of (principal profile, selected profile, joint action).

    Shape (G, K**n, S**n, S**n, A**n), conditioned on (g, joint type).
    """
    sel = selection_kernel(game, beta)
    joint_pi = pi.joint(game)                          # (G, S**n, K**n, A**n)
    pol = np.transpose(joint_pi, (0, 2, 1, 3))         # (G, K**n, S**n, A**n)
    return alpha.table[:, :, :, None, None] * sel[:, :, :, :, None] * pol[:, :, None, :, :]


def _kernels_from_law(game: GameSpec, law: np.ndarray) -> np.ndarray:
    """State kernel per joint type, shape (K**n, G, G)."""
    act = law.sum(axis=(2, 3))                          # (G, K**n, A**n)
    return np.einsum("gta,gah->tgh", act, game.transition)


def induced_kernel(game: GameSpec, alpha: SignalingRule, beta: SelectionRule, pi: Policy,
                   joint_type: int) -> np.ndarray:
    """Row-stochastic |G| x |G| state transition matrix under the profile."""
    law = profile_distribution(game, alpha, beta, pi)
    return _kernels_from_law(game, law)[joint_type]


def _reward_tensor(game: GameSpec) -> np.ndarray:
    """R_i arranged as (n, G, K**n, S**n, A**n) over selected profiles."""
    key = "rt"
    if key not in game._cache:
        sp, jt = game.signal_profile_table, game.joint_type_table
        out = np.empty((game.n_agents, game.n_states, jt.shape[0], sp.shape[0], game.n_joint_actions))
        for i in range(game.n_agents):
            r = game.rewards[i]                         # (A**n, G, S, K)
            r = np.transpose(r, (1, 3, 2, 0))           # (G, K, S, A**n)
            out[i] = r[:, jt[:, i]][:, :, sp[:, i]]
        out.setflags(write=False)
        game._cache[key] = out
    return game._cache[key]


# ---------------------------------------------------------------------------
# beliefs

def update_beliefs(game: GameSpec, alpha: SignalingRule) -> BeliefSystem:
    """Bayes posterior over others' principal signals and types.

    Conditioning is on (g, own principal signal, own type); zero-probability
    events get the uniform distribution and are marked in `fallback`.
    """
    n, G, S, K = game.n_agents, game.n_states, game.n_signals, game.n_types
    others_s, others_k = S ** (n - 1), K ** (n - 1)
    tab = alpha.table.reshape((G,) + (K,) * n + (S,) * n)
    prior = game.type_prior
    out = np.zeros((n, G, S, K, others_s, others_k))
    fallback = np.zeros((n, G, S, K), dtype=bool)
    for i in range(n):
        w = tab.copy()
        for j in range(n):
            if j != i:
                shape = [1] * w.ndim
                shape[1 + j] = K
                w = w * prior.reshape(shape)
        # bring own signal and own type to the front
        w = np.moveaxis(w, [1 + n + i, 1 + i], [1, 2])   # (G, S_i, K_i, K_others..., S_others...)
        rest_k = list(range(3, 3 + n - 1))
        rest_s = list(range(3 + n - 1, 3 + 2 * (n - 1)))
        w = np.transpose(w, [0, 1, 2] + rest_s + rest_k)
        w = w.reshape(G, S, K, others_s, others_k)
        z = w.sum(axis=(-1, -2), keepdims=True)
        zero = z[..., 0, 0] <= ZERO_MASS
        fallback[i] = zero
        safe = np.where(z > ZERO_MASS, z, 1.0)
        post = np.where(z > ZERO_MASS, w / safe, 1.0 / (others_s * others_k))
        out[i] = post
    return BeliefSystem(out, fallback)


# ---------------------------------------------------------------------------
# values

@dataclass(frozen=True, eq=False)
class ValueBundle:
    """Value triple per agent and joint type.

    J (n, K**n, G); V (n, K**n, G, S, S) indexed (g, own selected, own principal);
    Q (n, K**n, G, S, A**n) indexed (g, own selected, joint action).
    """

    J: np.ndarray
    V: np.ndarray
    Q: np.ndarray
    residual: float
    iterations: int
    tol: float

    def interim_J(self, game: GameSpec) -> np.ndarray:
        """J averaged over others' types under the prior, shape (n, K, G)."""
        prior = game.joint_type_prior()
        jt = game.joint_type_table
        out = np.zeros((game.n_agents, game.n_types, game.n_states))
        for i in range(game.n_agents):
            own = game.type_prior[jt[:, i]]
            w = np.where(own > 0, prior / np.where(own > 0, own, 1.0), 0.0)
            np.add.at(out[i], jt[:, i], w[:, None] * self.J[i])
        return out

    def ex_ante(self, game: GameSpec) -> np.ndarray:
        """Expected discounted payoff per agent under d_g and the type prior."""
        return np.einsum("t,itg,g->i", game.joint_type_prior(), self.J, game.state_init)


def _rewards_per_state(game, law):
    rt = _reward_tensor(game)                             # (n, G, K**n, S**n, A**n)
    return np.einsum("gtwva,igtva->itg", law, rt)


def _own_signal_projection(game):
    """One-hot map from signal profile to each agent's component, (n, S**n, S)."""
    sp = game.signal_profile_table
    eye = np.eye(game.n_signals)
    return np.stack([eye[sp[:, i]] for i in range(game.n_agents)])


def _q_from_j(game, J):
    rt = _reward_tensor(game)                             # (n, G, K**n, S**n, A**n)
    cont = np.einsum("gah,ith->itga", game.transition, J)  # (n, K**n, G, A**n)
    sp = game.signal_profile_table
    Q = np.empty((game.n_agents, game.n_joint_types, game.n_states, game.n_signals, game.n_joint_actions))
    for i in range(game.n_agents):
        # reward depends on own selected signal only; pick one representative profile
        reps = np.array([int(np.flatnonzero(sp[:, i] == s)[0]) for s in range(game.n_signals)])
        base = np.transpose(rt[i][:, :, reps, :], (1, 0, 2, 3))   # (K**n, G, S, A**n)
        Q[i] = base + game.gamma * cont[i][:, :, None, :]
    return Q


def _v_from_q(game, law, pi_joint, Q):
    """State-signal values, (n, K**n, G, S_own_selected, S_own_principal)."""
    n, S = game.n_agents, game.n_signals
    sp = game.signal_profile_table
    proj = _own_signal_projection(game)                   # (n, S**n, S)
    pol = np.transpose(pi_joint, (0, 2, 1, 3))            # (G, K**n, S**n(selected), A**n)
    wk = law.sum(axis=4)                                   # (G, K**n, S**n(principal), S**n(selected))
    V = np.empty((n, game.n_joint_types, game.n_states, S, S))
    for i in range(n):
        # value if agent i holds own selected signal x while others hold profile w_{-i}
        others = np.delete(sp, i, axis=1)
        o_flat = others @ (S ** np.arange(n - 2, -1, -1)) if n > 1 else np.zeros(sp.shape[0], dtype=np.int64)
        # substitute own selected component: profile index with own = x
        weights = S ** np.arange(n - 1, -1, -1)
        base_idx = sp @ weights - sp[:, i] * weights[i]   # profile with own slot zeroed
        # joint mass over (own principal, own selected, others selected)
        mass = np.zeros(wk.shape[:2] + (S, S, S ** (n - 1)))
        own_k = sp[:, i]
        for wp in range(sp.shape[0]):
            for ws in range(sp.shape[0]):
                mass[:, :, own_k[wp], sp[ws, i], o_flat[ws]] += wk[:, :, wp, ws]
        fallback_k = mass.sum(axis=3)                      # (G, K**n, S_pk, S**(n-1))
        for x in range(S):
            prof = base_idx + x * weights[i]               # profile index per w (others from w)
            # expected Q over actions drawn with own selected = x
            eq = np.einsum("gtwa,tgwa->gtw", pol[:, :, prof, :],
                           np.broadcast_to(Q[i][:, :, x, None, :], (game.n_joint_types, game.n_states, sp.shape[0], game.n_joint_actions)))
            # eq indexed by w whose others component is what matters
            eq_o = np.zeros(eq.shape[:2] + (S ** (n - 1),))
            eq_o[:, :, o_flat] = eq
            cond = mass[:, :, :, x, :]                       # (G, K**n, S_pk, others)
            z = cond.sum(axis=-1, keepdims=True)
            zf = fallback_k.sum(axis=-1, keepdims=True)
            w_cond = np.where(z > ZERO_MASS, cond / np.where(z > ZERO_MASS, z, 1.0),
                              np.where(zf > ZERO_MASS, fallback_k / np.where(zf > ZERO_MASS, zf, 1.0),
                                       1.0 / S ** (n - 1)))
            V[i][:, :, x, :] = np.transpose(np.einsum("gtko,gto->gtk", w_cond, eq_o), (1, 0, 2))
    return V


def _own_pair_mass(game, law):
    """P(own selected, own principal | g, joint type), (n, K**n, G, S, S)."""
    sp = game.signal_profile_table
    wk = law.sum(axis=4)                                    # (G, K**n, S**n, S**n)
    proj = _own_signal_projection(game)
    return np.einsum("gtpq,iqx,ipk->itgxk", wk, proj, proj)


def bellman_residuals(game, law, pi_joint, J, V, Q):
    """Sup-norm residuals of the three Bellman identities."""
    cont = np.einsum("gah,ith->itga", game.transition, J)
    r_q = np.max(np.abs(Q - (_q_from_j(game, J) - 0.0))) if Q.size else 0.0
    V_ref = _v_from_q(game, law, pi_joint, Q)
    r_v = np.max(np.abs(V - V_ref)) if V.size else 0.0
    pair = _own_pair_mass(game, law)
    J_ref = np.einsum("itgxk,itgxk->itg", pair, V)
    r_j = np.max(np.abs(J - J_ref)) if J.size else 0.0
    return float(max(r_q, r_v, r_j))


def direct_state_values(game, law) -> np.ndarray:
    """J by a direct solve of (I - gamma P) J = r, shape (n, K**n, G)."""
    P = _kernels_from_law(game, law)
    r = _rewards_per_state(game, law)
    eye = np.eye(game.n_states)
    out = np.empty_like(r)
    for t in range(P.shape[0]):
        out[:, t] = np.linalg.solve(eye - game.gamma * P[t], r[:, t].T).T
    return out


def compute_values(game: GameSpec, alpha: SignalingRule, beta: SelectionRule, pi: Policy,
                   mu: BeliefSystem | None = None, tol: float = 1e-10,
                   max_iter: int | None = None) -> ValueBundle:
    """Solve the Bellman system by successive approximation from zero.

    Continuation values are evaluated per joint type, so beliefs only enter
    the interim expectations taken by the equilibrium checks; `mu` is
    accepted for interface symmetry.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    law = profile_distribution(game, alpha, beta, pi)
    P = _kernels_from_law(game, law)
    r = _rewards_per_state(game, law)
    gamma = game.gamma
    rmax = max(game.reward_bound, 1e-300)
    if max_iter is None:
        if gamma == 0.0:
            max_iter = 2
        else:
            need = math.log(tol * (1 - gamma) / rmax) / math.log(gamma) if tol * (1 - gamma) < rmax else 1
            max_iter = int(math.ceil(max(need, 1))) + 50
    J = np.zeros_like(r)
    it, diff = 0, np.inf
    while it < max_iter:
        J_new = r + gamma * np.einsum("tgh,ith->itg", P, J)
        diff = float(np.max(np.abs(J_new - J))) if J.size else 0.0
        J = J_new
        it += 1
        # a-posteriori bound on the distance to the fixed point
        if gamma == 0.0 or diff * gamma / (1 - gamma) <= tol:
            break
    else:
        raise ConvergenceError(f"residual {diff:.3e} above {tol:.1e} after {it} iterations")
    Q = _q_from_j(game, J)
    pi_joint = pi.joint(game)
    V = _v_from_q(game, law, pi_joint, Q)
    residual = bellman_residuals(game, law, pi_joint, J, V, Q)
    if residual > tol:
        raise ConvergenceError(f"residual {residual:.3e} above {tol:.1e}")
    return ValueBundle(J=J, V=V, Q=Q, residual=residual, iterations=it, tol=tol)


# ---------------------------------------------------------------------------
# occupancy measures

@dataclass(frozen=True, eq=False)
class OccupancyMeasure:
    """rho(g, joint action, selected profile, principal profile | joint type).

    Table shape (K**n, G, A**n, S**n, S**n); each joint-type slice has mass 1/(1-gamma).
    """

    table: np.ndarray
    gamma: float

    def mass(self) -> np.ndarray:
        return self.table.sum(axis=(1, 2, 3, 4))

    def obedient(self) -> np.ndarray:
        """Diagonal slice rho(g, a, w, w), shape (K**n, G, A**n, S**n)."""
        return np.diagonal(self.table, axis1=3, axis2=4)

    def state_action(self) -> np.ndarray:
        return self.table.sum(axis=(3, 4))


def state_occupancy(game: GameSpec, kernels: np.ndarray, gamma: float | None = None) -> np.ndarray:
    """Discounted state visitation per joint type, (K**n, G), by direct solve."""
    gamma = game.gamma if gamma is None else gamma
    eye = np.eye(game.n_states)
    out = np.empty((kernels.shape[0], game.n_states))
    for t in range(kernels.shape[0]):
        out[t] = np.linalg.solve((eye - gamma * kernels[t]).T, game.state_init)
    return out


def occupancy_from_law(game: GameSpec, law: np.ndarray) -> OccupancyMeasure:
    P = _kernels_from_law(game, law)
    nu = state_occupancy(game, P)
    tab = nu.T[:, :, None, None, None] * law              # (G, K**n, wk, w, a)
    tab = np.transpose(tab, (1, 0, 4, 3, 2))               # (K**n, G, a, w, wk)
    return OccupancyMeasure(np.ascontiguousarray(tab), game.gamma)


def occupancy_from_profile(game: GameSpec, alpha: SignalingRule, beta: SelectionRule,
                           pi: Policy, joint_type: int | None = None) -> OccupancyMeasure:
    """Occupancy measure of the profile; all joint types unless one is given.

    With joint_type the table keeps a leading axis of length 1.
    """
    occ = occupancy_from_law(game, profile_distribution(game, alpha, beta, pi))
    if joint_type is None:
        return occ
    return OccupancyMeasure(occ.table[joint_type:joint_type + 1], occ.gamma)


def flow_residual(game: GameSpec, alpha: SignalingRule, rho: OccupancyMeasure) -> float:
    """Largest violation of the Bellman flow identity over (g, principal profile, joint type)."""
    tab = rho.table
    lhs = tab.sum(axis=(2, 3))                                   # (K**n, G, wk)
    inflow = np.einsum("tgawk,gah->th", tab, game.transition)    # (K**n, G)
    rhs = np.transpose(alpha.table, (1, 0, 2)) * (game.state_init[None, :] + rho.gamma * inflow)[:, :, None]
    return float(np.max(np.abs(lhs - rhs)))


def policy_from_occupancy(rho: OccupancyMeasure | np.ndarray) -> Policy:
    """Correlated policy over selected profiles; zero-mass cells become uniform and are flagged."""
    tab = rho.table if isinstance(rho, OccupancyMeasure) else np.asarray(rho)
    if np.any(tab < -1e-12):
        raise ValueError("occupancy must be nonnegative")
    per = np.clip(tab, 0.0, None).sum(axis=4)                # (K**n, G, A**n, S**n)
    per = np.transpose(per, (1, 3, 0, 2))                     # (G, S**n, K**n, A**n)
    z = per.sum(axis=-1, keepdims=True)
    zero = z[..., 0] <= ZERO_MASS
    out = np.where(z > ZERO_MASS, per / np.where(z > ZERO_MASS, z, 1.0), 1.0 / per.shape[-1])
    flags = tuple(tuple(int(v) for v in idx) for idx in np.argwhere(zero))
    return Policy(out, correlated=True, flags=flags)


def recover_rule(rho: OccupancyMeasure | np.ndarray) -> SignalingRule:
    """alpha by conditional normalization of the principal-signal marginal; zero-mass rows uniform, flagged."""
    tab = rho.table if isinstance(rho, OccupancyMeasure) else np.asarray(rho)
    marg = np.clip(tab, 0.0, None).sum(axis=(2, 3))           # (K**n, G, wk)
    marg = np.transpose(marg, (1, 0, 2))                      # (G, K**n, wk)
    z = marg.sum(axis=-1, keepdims=True)
    zero = z[..., 0] <= ZERO_MASS
    out = np.where(z > ZERO_MASS, marg / np.where(z > ZERO_MASS, z, 1.0), 1.0 / marg.shape[-1])
    flags = tuple(tuple(int(v) for v in idx) for idx in np.argwhere(zero))
    return SignalingRule(out, flags=flags)


def goal_kernels(game: GameSpec, kappa: Goal) -> np.ndarray:
    return np.einsum("gta,gah->tgh", kappa.table, game.transition)


def goal_occupancy(game: GameSpec, kappa: Goal, joint_type: int | None = None,
                   gamma: float | None = None) -> np.ndarray:
    """rho^kappa(g, joint action | joint type), (K**n, G, A**n) or (G, A**n) for one type."""
    nu = state_occupancy(game, goal_kernels(game, kappa), gamma)
    out = nu[:, :, None] * np.transpose(kappa.table, (1, 0, 2))
    return out if joint_type is None else out[joint_type]


# ---------------------------------------------------------------------------
# truncated sequential occupancy

@dataclass(frozen=True, eq=False)
class TruncatedSequenceDistribution:
    """Discounted window occupancy of length-t sequences for one joint type.

    `sequences` rows are (g_0, wk_0, then per step: w_s, a_s, g_{s+1}, wk_{s+1});
    windows tile the horizon [0, T_max] without overlap.
    """

    length: int
    truncation: int
    joint_type: int
    sequences: np.ndarray
    weights: np.ndarray
    start_probs: np.ndarray
    rewards: np.ndarray          # (n, N) discounted in-window reward per agent
    q_values: np.ndarray         # (n, N) extended Bellman Q
    truncation_bound: float

    def value(self, agent: int) -> float:
        return float(self.rewards[agent] @ self.weights)

    def state_signal_weights(self):
        """lambda_0 style marginal over (g_0, wk_0) of the windows."""
        return self.sequences[:, :2], self.weights

    def extended_v(self, agent: int):
        """V over action-free sequences: expectation of Q given the action-free part."""
        keep = [0, 1] + [c for c in range(2, self.sequences.shape[1]) if (c - 2) % 4 != 1]
        keys = self.sequences[:, keep]
        uniq, inv = np.unique(keys, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        num = np.zeros(len(uniq))
        den = np.zeros(len(uniq))
        np.add.at(num, inv, self.start_probs * self.q_values[agent])
        np.add.at(den, inv, self.start_probs)
        return uniq, np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0), den


def truncated_sequential_occupancy(game: GameSpec, alpha: SignalingRule, beta: SelectionRule,
                                   pi: Policy, mu: BeliefSystem | None = None, t: int = 1,
                                   T_max: int = 30, joint_type: int = 0,
                                   cap: int = 10**6) -> TruncatedSequenceDistribution:
    if t < 0 or T_max < t:
        raise ValueError("need 0 <= t <= T_max")
    law = profile_distribution(game, alpha, beta, pi)[:, joint_type]   # (G, wk, w, a)
    P = _kernels_from_law(game, profile_distribution(game, alpha, beta, pi))[joint_type]
    gamma = game.gamma
    G = game.n_states
    alpha_t = alpha.table[:, joint_type]                                 # (G, wk)
    rt = _reward_tensor(game)[:, :, joint_type]                          # (n, G, w, a)
    J = direct_state_values(game, profile_distribution(game, alpha, beta, pi))[:, joint_type]

    # discounted start weight of each window: tiles at 0, t, 2t, ... with end <= T_max
    step = max(t, 1)
    starts = [tau for tau in range(0, T_max + 1, step) if tau + t <= T_max]
    dist = game.state_init.copy()
    start_w = np.zeros(G)
    tau_set = set(starts)
    for tau in range(0, T_max + 1):
        if tau in tau_set:
            start_w += gamma ** tau * dist
        dist = dist @ P

    rows, w0, p0, rew = [], [], [], []
    for g in range(G):
        for wk in np.flatnonzero(alpha_t[g] > 0):
            rows.append([g, wk])
            w0.append(start_w[g] * alpha_t[g, wk])
            p0.append(game.state_init[g] * alpha_t[g, wk])
            rew.append(np.zeros(game.n_agents))
    seq = np.array(rows, dtype=np.int64).reshape(-1, 2)
    weights = np.array(w0, dtype=float)
    probs0 = np.array(p0, dtype=float)
    rewards = np.array(rew, dtype=float).reshape(-1, game.n_agents)
    for s in range(t):
        new_rows, new_w, new_p, new_r = [], [], [], []
        for row, w, p, r in zip(seq, weights, probs0, rewards):
            g, wk = int(row[-2]), int(row[-1])
            for wsel in np.flatnonzero(law[g, wk].sum(axis=-1) > 0):
                for a in np.flatnonzero(law[g, wk, wsel] > 0):
                    pa = law[g, wk, wsel, a] / alpha_t[g, wk]
                    r_step = r + gamma ** s * rt[:, g, wsel, a]
                    for g2 in np.flatnonzero(game.transition[g, a] > 0):
                        for wk2 in np.flatnonzero(alpha_t[g2] > 0):
                            q = pa * game.transition[g, a, g2] * alpha_t[g2, wk2]
                            new_rows.append(np.concatenate([row, [wsel, a, g2, wk2]]))
                            new_w.append(w * q)
                            new_p.append(p * q)
                            new_r.append(r_step)
                            if len(new_rows) > cap:
                                raise SequenceCapError(f"|H_{t}| support exceeds cap {cap}")
        seq = np.array(new_rows, dtype=np.int64).reshape(-1, 2 + 4 * (s + 1))
        weights = np.array(new_w)
        probs0 = np.array(new_p)
        rewards = np.array(new_r).reshape(-1, game.n_agents)
    # extended Bellman Q: in-window reward plus discounted continuation from the final node
    if t == 0:
        node_val = np.einsum("gkwa,igwa->igk", law, rt + gamma * np.einsum("gah,ih->iga", game.transition, J)[:, :, None, :])
        node_val = node_val / np.where(alpha_t[None] > 0, alpha_t[None], 1.0)
        q_values = node_val[:, seq[:, 0], seq[:, 1]]
    else:
        last_g = seq[:, -2]
        q_values = rewards.T + gamma ** t * J[:, last_g]
    rmax = game.reward_bound
    bound = gamma ** (T_max - t + 1) * rmax / (1 - gamma) if gamma > 0 else 0.0
    return TruncatedSequenceDistribution(
        length=t, truncation=T_max, joint_type=joint_type, sequences=seq, weights=weights,
        start_probs=probs0, rewards=rewards.T.copy(), q_values=q_values, truncation_bound=bound)
