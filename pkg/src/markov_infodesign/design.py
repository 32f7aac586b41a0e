"""The principal's side: obedient design LPs, refinement, goal selection and certificates."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from . import dynamics as dyn
from . import equilibrium as eqm
from .game_core import (DEFAULT_DEVIATION_CAP, GameSpec, Goal, Policy, SelectionRule,
                        SignalingRule, count_deviations)
from .lp import LinearProgram, LPSolution, solve_lp

DEFAULT_TOL = 1e-6
LP_VARIABLE_CAP = 200_000


class DimensionCapError(RuntimeError):
    pass


class InfeasibleGoalError(RuntimeError):
    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class NotEquilibriumError(RuntimeError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator with explicit 64-bit seeding."""
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


# ---------------------------------------------------------------------------
# LP over occupancy variables

def _occupancy_shape(game: GameSpec, n_types: int):
    SP = game.n_signal_profiles
    return (n_types, game.n_states, game.n_joint_actions, SP, SP)


def build_oil_lp(game: GameSpec, kappa: Goal, joint_type: int | None = None,
                 incentives: bool | None = None, tol: float = DEFAULT_TOL,
                 cap: int = LP_VARIABLE_CAP) -> LinearProgram:
    """Occupancy LP for an obedient design of goal kappa.

    Variables rho(type, g, joint action, selected profile, principal profile),
    one block per joint type (all joint types unless one is given). Rows:
    signal-free flow per (type, g); support rho = 0 off the obedient diagonal;
    goal marginals per (type, g, joint action); with incentives (default when
    gamma = 0) one obedience inequality per (agent, g, own type, own signal,
    recommended action, alternative action), relaxed by tol/2 per unit mass.
    """
    if incentives is None:
        incentives = game.gamma == 0.0
    types = range(game.n_joint_types) if joint_type is None else [joint_type]
    types = list(types)
    T = len(types)
    shape = _occupancy_shape(game, T)
    n_vars = int(np.prod(shape))
    if n_vars > cap:
        raise DimensionCapError(f"LP would have {n_vars} variables, cap {cap}")
    G, AJ, SP = game.n_states, game.n_joint_actions, game.n_signal_profiles
    idx = np.arange(n_vars).reshape(shape)
    prior = game.joint_type_prior()

    # objective: prior-weighted total agent reward on obedient cells
    rt = dyn._reward_tensor(game)                                     # (n, G, K**n, SP, AJ)
    total = rt.sum(axis=0)[:, types]                                  # (G, T, SP, AJ)
    c = np.zeros(shape)
    diag = np.arange(SP)
    c[:, :, :, diag, diag] = (prior[types][:, None, None, None]
                              * np.transpose(total, (1, 0, 3, 2)))
    eq_rows, eq_rhs, eq_names = [], [], []

    # flow rows
    for tpos, t in enumerate(types):
        for g in range(G):
            row = np.zeros(shape)
            row[tpos, g] += 1.0
            row[tpos] -= game.gamma * game.transition[:, :, g][:, :, None, None]
            eq_rows.append(row.ravel())
            eq_rhs.append(game.state_init[g])
            eq_names.append(f"flow[t{t},g{g}]")
    # support rows
    off = ~np.eye(SP, dtype=bool)
    for v in idx[:, :, :, off].ravel():
        row = np.zeros(n_vars)
        row[v] = 1.0
        eq_rows.append(row)
        eq_rhs.append(0.0)
        eq_names.append(f"support[{v}]")
    # goal marginal rows
    rho_kappa = dyn.goal_occupancy(game, kappa)                      # (K**n, G, AJ)
    for tpos, t in enumerate(types):
        for g in range(G):
            for a in range(AJ):
                row = np.zeros(shape)
                row[tpos, g, a] = 1.0
                eq_rows.append(row.ravel())
                eq_rhs.append(rho_kappa[t, g, a])
                eq_names.append(f"goal[t{t},g{g},a{a}]")

    ub_rows, ub_rhs, ub_names = [], [], []
    if incentives:
        sp, jt, ja = game.signal_profile_table, game.joint_type_table, game.joint_action_table
        A = game.n_actions
        for i in range(game.n_agents):
            repl = eqm._replace_component(game, i)
            for g in range(G):
                for k in range(game.n_types):
                    tsel = [tp for tp, t in enumerate(types) if jt[t, i] == k]
                    if not tsel:
                        continue
                    for s in range(game.n_signals):
                        wsel = np.flatnonzero(sp[:, i] == s)
                        for a_own in range(A):
                            asel = np.flatnonzero(ja[:, i] == a_own)
                            for a_alt in range(A):
                                if a_alt == a_own:
                                    continue
                                row = np.zeros(shape)
                                for tp in tsel:
                                    t = types[tp]
                                    r_i = game.rewards[i, :, g, s, k]
                                    diff = r_i[repl[asel, a_alt]] - r_i[asel]   # gain of switching
                                    w = np.prod(np.delete(game.type_prior[jt[t]], i))
                                    for wv in wsel:
                                        row[tp, g, asel, wv, wv] = w * (diff - 0.5 * tol)
                                ub_rows.append(row.ravel())
                                ub_rhs.append(0.0)
                                ub_names.append(f"obey[i{i},g{g},k{k},s{s},a{a_own}->{a_alt}]")
    names = tuple(f"rho[t{types[t]},g{g},a{a},w{w},k{wk}]" for t, g, a, w, wk in np.ndindex(*shape))
    return LinearProgram(c.ravel(), np.array(eq_rows).reshape(-1, n_vars), np.array(eq_rhs),
                         np.array(ub_rows).reshape(-1, n_vars), np.array(ub_rhs),
                         var_names=names, eq_names=tuple(eq_names), ub_names=tuple(ub_names))


def occupancy_from_solution(game: GameSpec, x: np.ndarray, joint_type: int | None = None):
    T = game.n_joint_types if joint_type is None else 1
    return dyn.OccupancyMeasure(np.asarray(x).reshape(_occupancy_shape(game, T)), game.gamma)


def recover_rule(rho: dyn.OccupancyMeasure) -> SignalingRule:
    """alpha(principal profile | g, joint type) by conditional normalization; zero-mass rows uniform."""
    return dyn.recover_rule(rho)


# ---------------------------------------------------------------------------
# results

@dataclass(frozen=True, eq=False)
class EpsilonCertificate:
    psi: np.ndarray              # (G, K**n) best one-shot improvement
    phi: np.ndarray              # (K**n,) max over states
    epsilon: float               # max phi / (1 - gamma_hat)
    agent_bound: float           # max phi / (1 - gamma)
    flow_residual: float

    def to_dict(self):
        return eqm._jsonable({"psi": self.psi, "phi": self.phi, "epsilon": self.epsilon,
                              "agent_bound": self.agent_bound, "flow_residual": self.flow_residual})


@dataclass(frozen=True, eq=False)
class DesignResult:
    alpha: SignalingRule | None
    policy: Policy | None
    occupancy: dyn.OccupancyMeasure | None
    verification: eqm.EquilibriumReport | None
    slacks: eqm.SlackCertificate | None
    status: str                   # verified-OIL, epsilon-OIL or infeasible
    epsilon: EpsilonCertificate | None = None
    lp_objective: float | None = None
    lp_iterations: int = 0
    certificate: dict | None = None
    refined: bool = False

    def to_dict(self, include_tables: bool = True):
        out = {
            "status": self.status,
            "lp_objective": self.lp_objective,
            "lp_iterations": self.lp_iterations,
            "refined": self.refined,
            "verification": self.verification.to_dict() if self.verification else None,
            "slacks": self.slacks.to_dict() if self.slacks else None,
            "epsilon": self.epsilon.to_dict() if self.epsilon else None,
            "certificate": self.certificate,
        }
        if include_tables:
            out["alpha"] = self.alpha.table if self.alpha is not None else None
            out["policy"] = self.policy.table if self.policy is not None else None
            out["occupancy"] = self.occupancy.table if self.occupancy is not None else None
        return eqm._jsonable(out)


# ---------------------------------------------------------------------------
# certificates and payoffs

def epsilon_certificate(game: GameSpec, alpha: SignalingRule, beta: SelectionRule, pi: Policy,
                        mu=None, values: dyn.ValueBundle | None = None) -> EpsilonCertificate:
    """Sup-norm one-shot optimality residual and the implied epsilon.

    psi(g, joint type) is the largest improvement any agent whose own type is
    that joint type's component can get from a one-shot deviation at an
    on-support information set in state g.
    """
    per_agent = eqm.one_shot_gains(game, alpha, beta, pi, values)
    jt = game.joint_type_table
    psi = np.zeros((game.n_states, game.n_joint_types))
    for i, (info, pol, sel) in enumerate(per_agent):
        best = np.maximum(pol, sel).max(axis=(1, 3))                  # (G, K)
        best = np.maximum(best, 0.0)
        psi = np.maximum(psi, best[:, jt[:, i]])
    phi = psi.max(axis=0)
    top = float(phi.max()) if phi.size else 0.0
    occ = dyn.occupancy_from_profile(game, alpha, beta, pi)
    return EpsilonCertificate(psi=psi, phi=phi, epsilon=top / (1.0 - game.gamma_hat),
                              agent_bound=top / (1.0 - game.gamma),
                              flow_residual=dyn.flow_residual(game, alpha, occ))


def _goal_value(game: GameSpec, kappa_table: np.ndarray, reward: np.ndarray, gamma: float):
    """Ex-ante discounted value of reward (AJ, G, K**n) when actions follow kappa."""
    P = np.einsum("gta,gah->tgh", kappa_table, game.transition)
    u = np.einsum("gta,agt->tg", kappa_table, reward)
    eye = np.eye(game.n_states)
    J = np.stack([np.linalg.solve(eye - gamma * P[t], u[t]) for t in range(P.shape[0])])
    return float(game.joint_type_prior() @ J @ game.state_init), J


def principal_payoff(game: GameSpec, kappa: Goal) -> float:
    """Principal's expected discounted payoff when the goal is implemented."""
    return _goal_value(game, kappa.table, game.principal_reward, game.gamma_hat)[0]


def principal_payoff_profile(game: GameSpec, alpha: SignalingRule, beta: SelectionRule,
                             pi: Policy) -> float:
    marg = eqm.induced_action_marginal(game, alpha, beta, pi)
    return _goal_value(game, marg, game.principal_reward, game.gamma_hat)[0]


# ---------------------------------------------------------------------------
# design

def _split_to_profile(game: GameSpec, kappa: Goal, split: np.ndarray):
    """Obedient (alpha, correlated pi) from a split x(g, type, profile, action) of kappa."""
    alpha = split.sum(axis=3)                                         # (G, T, SP)
    pol = np.where(alpha[..., None] > dyn.ZERO_MASS,
                   split / np.where(alpha > dyn.ZERO_MASS, alpha, 1.0)[..., None],
                   kappa.table[:, :, None, :])
    pol = pol / pol.sum(axis=-1, keepdims=True)
    alpha = alpha / alpha.sum(axis=-1, keepdims=True)
    return SignalingRule(alpha), Policy(np.transpose(pol, (0, 2, 1, 3)).copy(), correlated=True)


def _split_from_occupancy(game: GameSpec, kappa: Goal, rho: dyn.OccupancyMeasure):
    """Per-(g, type) normalized split of kappa; unvisited (g, type) send profile 0 and play kappa."""
    diag = np.transpose(rho.obedient(), (1, 0, 3, 2))                  # (G, T, SP, AJ)
    mass = diag.sum(axis=(2, 3), keepdims=True)
    fill = np.zeros_like(diag)
    fill[:, :, 0, :] = kappa.table
    return np.where(mass > dyn.ZERO_MASS, diag / np.where(mass > dyn.ZERO_MASS, mass, 1.0), fill)


def _worst_gain(game, alpha, pi):
    beta = SelectionRule.obedient(game)
    per_agent = eqm.one_shot_gains(game, alpha, beta, pi)
    worst = 0.0
    for _, pol, sel in per_agent:
        for gains in (pol, sel):
            if np.isfinite(gains).any():
                worst = max(worst, float(gains[np.isfinite(gains)].max()))
    return worst


def _refine(game, kappa, split0, rng, restarts, steps, step_size, tol):
    """Projected coordinate ascent on the minimum one-shot slack over kappa splits."""
    G, T, SP, AJ = split0.shape
    best = None
    for r in range(restarts):
        if r == 0:
            split = split0.copy()
        else:
            split = rng.dirichlet(np.ones(SP), size=(G, T, AJ))          # (G, T, AJ, SP)
            split = np.transpose(split, (0, 1, 3, 2)) * kappa.table[:, :, None, :]
        score = -_worst_gain(game, *_split_to_profile(game, kappa, split))
        step = step_size
        for _ in range(steps):
            if score >= -tol * 0.5 or step < 1e-6:
                break
            g, t, a = rng.integers(G), rng.integers(T), rng.integers(AJ)
            src, dst = rng.choice(SP, size=2, replace=False)
            amount = step * max(split[g, t, src, a], kappa.table[g, t, a] / SP)
            amount = min(amount, split[g, t, src, a])
            if amount <= 0:
                step *= 0.5
                continue
            cand = split.copy()
            cand[g, t, src, a] -= amount
            cand[g, t, dst, a] += amount
            cand_score = -_worst_gain(game, *_split_to_profile(game, kappa, cand))
            if cand_score > score:
                split, score = cand, cand_score
                step = step_size
            else:
                step *= 0.5
        alpha, _ = _split_to_profile(game, kappa, split)
        key = (score, tuple(-alpha.table.ravel()))
        if best is None or key > best[0]:
            best = (key, split)
    return best[1], best[0][0]


def _maybe_slacks(game, alpha, beta, pi, slack_cap):
    n_pol, n_sel = count_deviations(game)
    if n_pol > slack_cap or (game.n_sources > 1 and n_sel > slack_cap):
        return None
    return eqm.compute_slacks(game, alpha, beta, pi)


def design_oil(game: GameSpec, kappa: Goal, tol: float = DEFAULT_TOL, restarts: int = 16,
               steps: int = 200, step_size: float = 0.1, seed: int = 0, t_dev: int = 2,
               incentives: bool | None = None, slack_cap: int = 4096,
               raise_on_infeasible: bool = False) -> DesignResult:
    """Obedient design of a goal: LP, rule recovery, verification, then refinement if needed."""
    lp = build_oil_lp(game, kappa, incentives=incentives, tol=tol)
    sol = solve_lp(lp)
    if sol.status != "optimal":
        if raise_on_infeasible:
            raise InfeasibleGoalError("goal LP infeasible", sol.certificate)
        cert = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in sol.certificate.items()}
        return DesignResult(None, None, None, None, None, "infeasible", lp_iterations=sol.iterations,
                            certificate=cert)
    rho = occupancy_from_solution(game, sol.x)
    split = _split_from_occupancy(game, kappa, rho)
    beta = SelectionRule.obedient(game)
    alpha, pi = _split_to_profile(game, kappa, split)
    report = eqm.check_o_pbme(game, alpha, beta, pi, None, kappa, tol, t_dev)
    refined = False
    if not report.is_equilibrium and game.n_signal_profiles > 1 and restarts > 0:
        split, _ = _refine(game, kappa, split, make_rng(seed), restarts, steps, step_size, tol)
        alpha, pi = _split_to_profile(game, kappa, split)
        report = eqm.check_o_pbme(game, alpha, beta, pi, None, kappa, tol, t_dev)
        refined = True
    occ = dyn.occupancy_from_profile(game, alpha, beta, pi)
    slacks = _maybe_slacks(game, alpha, beta, pi, slack_cap)
    if report.is_equilibrium:
        status, eps = "verified-OIL", None
    else:
        eps = epsilon_certificate(game, alpha, beta, pi)
        status = "epsilon-OIL"
    return DesignResult(alpha, pi, occ, report, slacks, status, eps, sol.objective, sol.iterations,
                        None, refined)


def directify(game: GameSpec, alpha: SignalingRule, beta: SelectionRule, pi: Policy,
              tol: float = DEFAULT_TOL, check: bool = True) -> SignalingRule:
    """Pushforward of the selected signal: the direct rule sends what agents would have selected."""
    if check:
        report = eqm.check_pbme(game, alpha, beta, pi, None, tol)
        if not report.is_equilibrium:
            raise NotEquilibriumError("input profile is not a PBME", report)
    sel = dyn.selection_kernel(game, beta)                            # (G, T, SPk, SPsel)
    return SignalingRule(np.einsum("gtk,gtkw->gtw", alpha.table, sel))


# ---------------------------------------------------------------------------
# goal selection

def _agent_goal_q(game: GameSpec, kappa_table: np.ndarray):
    """Agents' Q under kappa, shape (n, K**n, G, A**n), rewards read at the first signal."""
    out = []
    for i in range(game.n_agents):
        r = game.rewards[i, :, :, 0, :][:, :, game.joint_type_table[:, i]]   # (AJ, G, T)
        _, J = _goal_value(game, kappa_table, r, game.gamma)
        nxt = np.einsum("gah,th->tga", game.transition, J)
        out.append(np.transpose(r, (2, 1, 0)) + game.gamma * nxt)
    return np.stack(out)


def _goal_lp(game: GameSpec, kappa_table: np.ndarray):
    """Linearized goal LP around kappa: variables y(type, g, joint action) = prior * kappa."""
    T, G, AJ = game.n_joint_types, game.n_states, game.n_joint_actions
    prior = game.joint_type_prior()
    shape = (T, G, AJ)
    n_vars = T * G * AJ
    # principal weights: visitation times Q under the current goal
    P = np.einsum("gta,gah->tgh", kappa_table, game.transition)
    nu = dyn.state_occupancy(game, P, game.gamma_hat) + 1e-9
    _, Jp = _goal_value(game, kappa_table, game.principal_reward, game.gamma_hat)
    Qp = (np.transpose(game.principal_reward, (2, 1, 0))
          + game.gamma_hat * np.einsum("gah,th->tga", game.transition, Jp))
    c = (nu[:, :, None] * Qp / np.where(prior > 0, prior, 1.0)[:, None, None]).ravel()
    eq_rows, eq_rhs = [], []
    for t in range(T):
        for g in range(G):
            row = np.zeros(shape)
            row[t, g] = 1.0
            eq_rows.append(row.ravel())
            eq_rhs.append(prior[t])
    Q = _agent_goal_q(game, kappa_table)                              # (n, T, G, AJ)
    jt, ja = game.joint_type_table, game.joint_action_table
    ub_rows = []
    for i in range(game.n_agents):
        repl = eqm._replace_component(game, i)
        for g in range(G):
            for k in range(game.n_types):
                tsel = np.flatnonzero(jt[:, i] == k)
                for a_own in range(game.n_actions):
                    asel = np.flatnonzero(ja[:, i] == a_own)
                    for a_alt in range(game.n_actions):
                        if a_alt == a_own:
                            continue
                        row = np.zeros(shape)
                        for t in tsel:
                            row[t, g, asel] = Q[i, t, g, repl[asel, a_alt]] - Q[i, t, g, asel]
                        ub_rows.append(row.ravel())
    A_ub = np.array(ub_rows).reshape(-1, n_vars)
    return LinearProgram(c, np.array(eq_rows), np.array(eq_rhs), A_ub, np.zeros(len(A_ub)))


def _kappa_from_y(game, y):
    prior = game.joint_type_prior()
    y = np.clip(y.reshape(game.n_joint_types, game.n_states, game.n_joint_actions), 0.0, None)
    tab = np.transpose(y, (1, 0, 2))
    z = tab.sum(axis=-1, keepdims=True)
    tab = np.where(z > dyn.ZERO_MASS, tab / np.where(z > dyn.ZERO_MASS, z, 1.0), 1.0 / tab.shape[-1])
    return Goal(tab)


def _pure_bme_goals(game: GameSpec, cap: int = 4096):
    """Goals induced by pure Bayesian Markov Nash equilibria, found by enumeration."""
    n_each = game.n_actions ** (game.n_states * game.n_types)
    if n_each ** game.n_agents > cap:
        return []
    tables = [np.array(c).reshape(game.n_states, 1, game.n_types)
              for c in np.ndindex(*(game.n_actions,) * (game.n_states * game.n_types))]
    alpha = SignalingRule.constant(game, 0)
    beta = SelectionRule.obedient(game)
    found = []
    for combo in np.ndindex(*(n_each,) * game.n_agents):
        choice = np.stack([np.repeat(tables[c], game.n_signals, axis=1) for c in combo])
        pi = Policy.deterministic(game, choice)
        if eqm.check_bme(game, pi).is_equilibrium:
            found.append(Goal(eqm.induced_action_marginal(game, alpha, beta, pi)))
    return found


def select_goal(game: GameSpec, tol: float = DEFAULT_TOL, max_rounds: int = 50,
                design: bool = True, **design_kw):
    """Principal-optimal goal over correlated equilibria, then its obedient design.

    Each round solves an LP in the goal with agents' and principal's
    continuation values frozen at the previous goal; with both discounts zero
    one round is exact. Candidates are verified with check_bmce; pure
    equilibria found by enumeration serve as a fallback.
    Returns (goal, principal value, DesignResult or None).
    """
    kappa = Goal(np.full((game.n_states, game.n_joint_types, game.n_joint_actions),
                         1.0 / game.n_joint_actions))
    best = None
    for _ in range(max_rounds):
        sol = solve_lp(_goal_lp(game, kappa.table))
        if sol.status != "optimal":
            break
        new = _kappa_from_y(game, sol.x)
        if eqm.check_bmce(game, new, tol).is_equilibrium:
            val = principal_payoff(game, new)
            if best is None or val > best[1] + 1e-12:
                best = (new, val)
        converged = np.max(np.abs(new.table - kappa.table)) < 1e-10
        kappa = new
        if converged:
            break
    if best is None:
        cands = [(k, principal_payoff(game, k)) for k in _pure_bme_goals(game)]
        if not cands:
            raise RuntimeError("no verified correlated equilibrium found")
        best = max(cands, key=lambda kv: kv[1])
    result = design_oil(game, best[0], tol=tol, **design_kw) if design else None
    return best[0], best[1], result


# ---------------------------------------------------------------------------
# estimator front ends

class ObedientDesigner(BaseEstimator):
    """Fit an obedient signaling rule to a game for a fixed goal (or the principal-optimal one)."""

    def __init__(self, goal=None, tol=DEFAULT_TOL, restarts=16, steps=200, step_size=0.1,
                 seed=0, t_dev=2):
        self.goal = goal
        self.tol = tol
        self.restarts = restarts
        self.steps = steps
        self.step_size = step_size
        self.seed = seed
        self.t_dev = t_dev

    def fit(self, game: GameSpec, y=None):
        kw = dict(restarts=self.restarts, steps=self.steps, step_size=self.step_size,
                  seed=self.seed, t_dev=self.t_dev)
        if self.goal is None:
            self.goal_, self.principal_value_, self.result_ = select_goal(game, self.tol, **kw)
        else:
            self.goal_ = self.goal
            self.result_ = design_oil(game, self.goal, tol=self.tol, **kw)
            self.principal_value_ = principal_payoff(game, self.goal)
        self.status_ = self.result_.status
        self.alpha_ = self.result_.alpha
        self.policy_ = self.result_.policy
        return self

    def score(self, game: GameSpec, y=None):
        """Principal payoff of the fitted profile."""
        if self.alpha_ is None:
            return float("-inf")
        return principal_payoff_profile(game, self.alpha_, SelectionRule.obedient(game), self.policy_)


class GoalSelector(BaseEstimator):
    """Select the principal-optimal correlated-equilibrium goal of a game."""

    def __init__(self, tol=DEFAULT_TOL, max_rounds=50):
        self.tol = tol
        self.max_rounds = max_rounds

    def fit(self, game: GameSpec, y=None):
        self.goal_, self.principal_value_, _ = select_goal(game, self.tol, self.max_rounds,
                                                           design=False)
        return self
