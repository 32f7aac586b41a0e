"""Game objects, the JSON game-spec format, and finite deviation spaces.

Joint objects (joint actions, joint types, signal profiles, signal batches)
are stored as flat indices in C order: agent 0 is the most significant digit.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

PROB_TOL = 1e-9
DEFAULT_DEVIATION_CAP = 10**6

TOP_LEVEL_KEYS = (
    "agents", "states", "actions", "types", "signals", "sources",
    "transition", "state_init", "type_prior", "nonprincipal_dist",
    "rewards", "principal_reward", "gamma", "gamma_hat",
)


class GameSpecError(ValueError):
    """Raised for malformed or invalid game-spec documents."""

    def __init__(self, message, *, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


class DeviationCapError(RuntimeError):
    """Raised when a deviation space is larger than the configured cap."""


def joint_profiles(base: int, n: int) -> np.ndarray:
    """All length-n tuples over range(base) in C order, shape (base**n, n)."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((base,) * n).reshape(n, -1).T
    return np.ascontiguousarray(grids, dtype=np.int64)


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.setflags(write=False)
    return out


def _frozen_int(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.int64, copy=True)
    out.setflags(write=False)
    return out


def _check_simplex(vec, name, axis=-1):
    vec = np.asarray(vec, dtype=float)
    if not np.all(np.isfinite(vec)):
        raise GameSpecError("non-finite probability", field=name)
    if np.any(vec < -PROB_TOL):
        raise GameSpecError("negative probability", field=name)
    sums = vec.sum(axis=axis)
    bad = np.abs(sums - 1.0) > PROB_TOL
    if np.any(bad):
        idx = tuple(int(v) for v in np.argwhere(bad)[0]) if np.ndim(sums) else ()
        raise GameSpecError(f"probabilities sum to {np.asarray(sums)[idx]!r}, not 1 (row {idx})", field=name)


@dataclass(frozen=True, eq=False)
class GameSpec:
    """A finite augmented Bayesian Markov game.

    Array layouts (A = |actions|, G = |states|, S = |signals|, K = |types|):

    transition        (G, A**n, G)        next-state distribution per (g, joint action)
    state_init        (G,)
    type_prior        (K,)                per-agent prior; joint prior is the product
    nonprincipal_dist (S**((m-1)*n),)     joint batch of non-principal signals,
                                          agent-major then source order
    rewards           (n, A**n, G, S, K)  R_i(joint action, g, selected signal, own type)
    principal_reward  (A**n, G, K**n)
    """

    n_agents: int
    states: tuple
    actions: tuple
    types: tuple
    signals: tuple
    n_sources: int
    principal_source: int
    transition: np.ndarray
    state_init: np.ndarray
    type_prior: np.ndarray
    nonprincipal_dist: np.ndarray
    rewards: np.ndarray
    principal_reward: np.ndarray
    gamma: float
    gamma_hat: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for name in ("transition", "state_init", "type_prior", "nonprincipal_dist",
                     "rewards", "principal_reward"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        for name in ("states", "actions", "types", "signals"):
            object.__setattr__(self, name, tuple(str(s) for s in getattr(self, name)))
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "gamma_hat", float(self.gamma_hat))
        self.validate()

    # sizes
    @property
    def n_states(self):
        return len(self.states)

    @property
    def n_actions(self):
        return len(self.actions)

    @property
    def n_types(self):
        return len(self.types)

    @property
    def n_signals(self):
        return len(self.signals)

    @property
    def n_joint_actions(self):
        return self.n_actions ** self.n_agents

    @property
    def n_joint_types(self):
        return self.n_types ** self.n_agents

    @property
    def n_signal_profiles(self):
        return self.n_signals ** self.n_agents

    @property
    def n_batches(self):
        """Number of per-agent signal batches (one signal per source)."""
        return self.n_signals ** self.n_sources

    @property
    def n_nonprincipal(self):
        return self.n_signals ** ((self.n_sources - 1) * self.n_agents)

    @property
    def reward_bound(self):
        return float(np.max(np.abs(self.rewards))) if self.rewards.size else 0.0

    def validate(self):
        n, G, A, K, S = self.n_agents, self.n_states, self.n_actions, self.n_types, self.n_signals
        if n < 1:
            raise GameSpecError("need at least one agent", field="agents")
        for name, labels in (("states", self.states), ("actions", self.actions),
                             ("types", self.types), ("signals", self.signals)):
            if not labels:
                raise GameSpecError("must be non-empty", field=name)
            if len(set(labels)) != len(labels):
                raise GameSpecError("labels must be distinct", field=name)
            if any("|" in lab for lab in labels):
                raise GameSpecError("labels may not contain '|'", field=name)
        if self.n_sources < 1:
            raise GameSpecError("need at least one source", field="sources")
        if not 0 <= self.principal_source < self.n_sources:
            raise GameSpecError("principal index out of range", field="sources.principal")
        shapes = {
            "transition": (G, A ** n, G),
            "state_init": (G,),
            "type_prior": (K,),
            "nonprincipal_dist": (S ** ((self.n_sources - 1) * n),),
            "rewards": (n, A ** n, G, S, K),
            "principal_reward": (A ** n, G, K ** n),
        }
        for name, shape in shapes.items():
            got = getattr(self, name).shape
            if got != shape:
                raise GameSpecError(f"shape {got} != expected {shape}", field=name)
        _check_simplex(self.state_init, "state_init")
        _check_simplex(self.type_prior, "type_prior")
        _check_simplex(self.nonprincipal_dist, "nonprincipal_dist")
        sums = self.transition.sum(axis=-1)
        if np.any(self.transition < -PROB_TOL) or np.any(np.abs(sums - 1) > PROB_TOL):
            bad = np.argwhere((np.abs(sums - 1) > PROB_TOL) | np.any(self.transition < -PROB_TOL, axis=-1))[0]
            g, a = int(bad[0]), int(bad[1])
            raise GameSpecError(
                f"transition row (g={self.states[g]!r}, a={self.joint_action_label(a)!r}) "
                f"sums to {sums[g, a]!r}", field=f"transition.{self.states[g]}.{self.joint_action_label(a)}")
        for name in ("rewards", "principal_reward"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise GameSpecError("rewards must be finite", field=name)
        for name, val in (("gamma", self.gamma), ("gamma_hat", self.gamma_hat)):
            if not (0.0 <= val < 1.0) or math.isnan(val):
                raise GameSpecError(f"discount must lie in [0, 1), got {val!r}", field=name)

    # index helpers
    def _table(self, key, base, n):
        if key not in self._cache:
            tab = joint_profiles(base, n)
            tab.setflags(write=False)
            self._cache[key] = tab
        return self._cache[key]

    @property
    def joint_action_table(self):
        return self._table("ja", self.n_actions, self.n_agents)

    @property
    def joint_type_table(self):
        return self._table("jt", self.n_types, self.n_agents)

    @property
    def signal_profile_table(self):
        return self._table("sp", self.n_signals, self.n_agents)

    @property
    def batch_table(self):
        return self._table("bt", self.n_signals, self.n_sources)

    @property
    def nonprincipal_table(self):
        """Shape (S**((m-1)n), n, m-1): non-principal signals per agent."""
        key = "np"
        if key not in self._cache:
            tab = joint_profiles(self.n_signals, (self.n_sources - 1) * self.n_agents)
            tab = tab.reshape(tab.shape[0], self.n_agents, self.n_sources - 1)
            tab.setflags(write=False)
            self._cache[key] = tab
        return self._cache[key]

    def joint_type_prior(self):
        """Product prior over joint types, shape (K**n,)."""
        return np.prod(self.type_prior[self.joint_type_table], axis=1)

    def batch_index(self, principal_signal, others):
        """Flat batch index for one agent: principal signal placed at the principal position."""
        sigs = list(others)
        sigs.insert(self.principal_source, principal_signal)
        idx = 0
        for s in sigs:
            idx = idx * self.n_signals + int(s)
        return idx

    def agent_batches(self):
        """Batch index per (principal profile, non-principal draw, agent).

        Shape (S**n, S**((m-1)n), n).
        """
        key = "ab"
        if key not in self._cache:
            sp = self.signal_profile_table
            npt = self.nonprincipal_table
            S, m, k = self.n_signals, self.n_sources, self.principal_source
            out = np.zeros((sp.shape[0], npt.shape[0], self.n_agents), dtype=np.int64)
            weights = S ** np.arange(m - 1, -1, -1)
            for i in range(self.n_agents):
                others = npt[:, i, :]                       # (W, m-1)
                full = np.insert(others, k, 0, axis=1)      # (W, m)
                base = full @ weights                        # principal slot zero
                out[:, :, i] = base[None, :] + sp[:, i][:, None] * weights[k]
            out.setflags(write=False)
            self._cache[key] = out
        return self._cache[key]

    def joint_action_label(self, a):
        return "|".join(self.actions[x] for x in self.joint_action_table[a])

    def joint_type_label(self, t):
        return "|".join(self.types[x] for x in self.joint_type_table[t])

    def signal_profile_label(self, w):
        return "|".join(self.signals[x] for x in self.signal_profile_table[w])

    def __repr__(self):
        return (f"GameSpec(n={self.n_agents}, G={self.n_states}, A={self.n_actions}, "
                f"types={self.n_types}, signals={self.n_signals}, m={self.n_sources}, "
                f"gamma={self.gamma}, gamma_hat={self.gamma_hat})")


# ---------------------------------------------------------------------------
# strategic objects

@dataclass(frozen=True, eq=False)
class SignalingRule:
    """alpha(signal profile | g, joint type), table shape (G, K**n, S**n)."""

    table: np.ndarray
    flags: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "table", _frozen(self.table))
        if self.table.ndim != 3:
            raise ValueError("signaling table must be (G, K**n, S**n)")
        _check_simplex(self.table, "signaling_rule")

    @classmethod
    def uniform(cls, game: GameSpec):
        S = game.n_signal_profiles
        return cls(np.full((game.n_states, game.n_joint_types, S), 1.0 / S))

    @classmethod
    def constant(cls, game: GameSpec, profile: int = 0):
        tab = np.zeros((game.n_states, game.n_joint_types, game.n_signal_profiles))
        tab[:, :, profile] = 1.0
        return cls(tab)


@dataclass(frozen=True, eq=False)
class SelectionRule:
    """Deterministic batch-position choice, table shape (n, G, S**m, K)."""

    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "table", _frozen_int(self.table))
        if self.table.ndim != 4:
            raise ValueError("selection table must be (n, G, S**m, K)")

    @classmethod
    def obedient(cls, game: GameSpec):
        shape = (game.n_agents, game.n_states, game.n_batches, game.n_types)
        return cls(np.full(shape, game.principal_source, dtype=np.int64))

    def is_obedient(self, game: GameSpec):
        return bool(np.all(self.table == game.principal_source)) or game.n_sources == 1

    def with_agent(self, agent, table):
        tab = np.array(self.table)
        tab[agent] = table
        return SelectionRule(tab)


@dataclass(frozen=True, eq=False)
class Policy:
    """Independent (n, G, S, K, A) or correlated (G, S**n, K**n, A**n) action table."""

    table: np.ndarray
    correlated: bool = False
    flags: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "table", _frozen(self.table))
        expected = 4 if self.correlated else 5
        if self.table.ndim != expected:
            raise ValueError(f"policy table must have {expected} axes")
        _check_simplex(self.table, "policy")

    @classmethod
    def uniform(cls, game: GameSpec, correlated=False):
        if correlated:
            J = game.n_joint_actions
            return cls(np.full((game.n_states, game.n_signal_profiles, game.n_joint_types, J), 1.0 / J), True)
        A = game.n_actions
        return cls(np.full((game.n_agents, game.n_states, game.n_signals, game.n_types, A), 1.0 / A))

    @classmethod
    def deterministic(cls, game: GameSpec, choice):
        """choice: int array (n, G, S, K) of actions."""
        choice = np.asarray(choice, dtype=np.int64)
        tab = np.zeros(choice.shape + (game.n_actions,))
        np.put_along_axis(tab, choice[..., None], 1.0, axis=-1)
        return cls(tab)

    def with_agent(self, agent, table):
        if self.correlated:
            raise ValueError("agent replacement needs an independent policy")
        tab = np.array(self.table)
        tab[agent] = table
        return Policy(tab)

    def joint(self, game: GameSpec) -> np.ndarray:
        """Joint action table (G, S**n, K**n, A**n)."""
        if self.correlated:
            return np.asarray(self.table)
        sp = game.signal_profile_table
        jt = game.joint_type_table
        ja = game.joint_action_table
        out = np.ones((game.n_states, sp.shape[0], jt.shape[0], ja.shape[0]))
        for i in range(game.n_agents):
            # (G, S, K, A) -> (G, S**n, K**n, A**n)
            part = self.table[i][:, sp[:, i]][:, :, jt[:, i]][:, :, :, ja[:, i]]
            out = out * part
        return out


@dataclass(frozen=True, eq=False)
class BeliefSystem:
    """mu_i(others' principal signals, others' types | g, own principal signal, own type).

    Table shape (n, G, S, K, S**(n-1), K**(n-1)); each trailing block sums to 1.
    `fallback` marks conditioning events of zero probability (uniform rows).
    """

    table: np.ndarray
    fallback: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "table", _frozen(self.table))
        object.__setattr__(self, "fallback", np.array(self.fallback, dtype=bool))
        sums = self.table.sum(axis=(-1, -2))
        if np.any(np.abs(sums - 1) > PROB_TOL):
            raise ValueError("belief rows must be normalized")


@dataclass(frozen=True, eq=False)
class Goal:
    """kappa(joint action | g, joint type), table shape (G, K**n, A**n)."""

    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "table", _frozen(self.table))
        if self.table.ndim != 3:
            raise ValueError("goal table must be (G, K**n, A**n)")
        _check_simplex(self.table, "goal")


# ---------------------------------------------------------------------------
# JSON format

def _parse_prob_vector(value, length, name):
    if not isinstance(value, list) or len(value) != length:
        raise GameSpecError(f"expected a list of {length} numbers", field=name)
    try:
        vec = np.array([float(v) for v in value])
    except (TypeError, ValueError):
        raise GameSpecError("non-numeric entry", field=name) from None
    return vec


def _label_index(labels, name):
    return {lab: i for i, lab in enumerate(labels)}


def game_from_dict(doc: dict) -> GameSpec:
    if not isinstance(doc, dict):
        raise GameSpecError("top level must be a JSON object")
    unknown = sorted(set(doc) - set(TOP_LEVEL_KEYS))
    if unknown:
        raise GameSpecError(f"unknown key(s) {unknown}", field=unknown[0])
    missing = [k for k in TOP_LEVEL_KEYS if k not in doc]
    if missing:
        raise GameSpecError("missing key", field=missing[0])

    n = doc["agents"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise GameSpecError("must be a positive integer", field="agents")
    labels = {}
    for name in ("states", "actions", "types", "signals"):
        val = doc[name]
        if not isinstance(val, list) or not all(isinstance(v, str) for v in val):
            raise GameSpecError("must be a list of strings", field=name)
        labels[name] = val
    states, actions, types, signals = (labels[k] for k in ("states", "actions", "types", "signals"))
    G, A, K, S = len(states), len(actions), len(types), len(signals)

    src = doc["sources"]
    if not isinstance(src, dict) or set(src) != {"count", "principal"}:
        raise GameSpecError("must be an object with 'count' and 'principal'", field="sources")
    m, k = src["count"], src["principal"]
    if not isinstance(m, int) or not isinstance(k, int) or isinstance(m, bool):
        raise GameSpecError("count and principal must be integers", field="sources")
    if m < 1 or not 0 <= k < m:
        raise GameSpecError("principal index out of range", field="sources.principal")

    s_idx, a_idx, t_idx, w_idx = (_label_index(x, "") for x in (states, actions, types, signals))

    def split(key, parts, field_name):
        if not isinstance(key, str):
            raise GameSpecError("keys must be strings", field=field_name)
        toks = key.split("|") if key else []
        if len(toks) != parts:
            raise GameSpecError(f"key {key!r} must have {parts} '|'-separated parts", field=field_name)
        return toks

    def joint(tokens, lookup, field_name):
        idx = 0
        base = len(lookup)
        for tok in tokens:
            if tok not in lookup:
                raise GameSpecError(f"unknown label {tok!r}", field=field_name)
            idx = idx * base + lookup[tok]
        return idx

    trans_doc = doc["transition"]
    if not isinstance(trans_doc, dict):
        raise GameSpecError("must be an object keyed by state", field="transition")
    transition = np.full((G, A ** n, G), np.nan)
    for g_lab, rows in trans_doc.items():
        if g_lab not in s_idx:
            raise GameSpecError(f"unknown state {g_lab!r}", field=f"transition.{g_lab}")
        if not isinstance(rows, dict):
            raise GameSpecError("must map joint actions to vectors", field=f"transition.{g_lab}")
        for a_key, vec in rows.items():
            fname = f"transition.{g_lab}.{a_key}"
            a = joint(split(a_key, n, fname), a_idx, fname)
            transition[s_idx[g_lab], a] = _parse_prob_vector(vec, G, fname)
    if np.isnan(transition).any():
        g, a = np.argwhere(np.isnan(transition[:, :, 0]))[0]
        lab = "|".join(actions[x] for x in joint_profiles(A, n)[a])
        raise GameSpecError("transition row missing", field=f"transition.{states[g]}.{lab}")

    state_init = _parse_prob_vector(doc["state_init"], G, "state_init")
    type_prior = _parse_prob_vector(doc["type_prior"], K, "type_prior")

    np_doc = doc["nonprincipal_dist"]
    if not isinstance(np_doc, dict):
        raise GameSpecError("must map joint batches to probabilities", field="nonprincipal_dist")
    parts = (m - 1) * n
    nonprincipal = np.zeros(S ** parts)
    for key, p in np_doc.items():
        fname = f"nonprincipal_dist.{key}"
        w = joint(split(key, parts, fname), w_idx, fname)
        if isinstance(p, bool) or not isinstance(p, (int, float)):
            raise GameSpecError("probability must be a number", field=fname)
        nonprincipal[w] = float(p)

    rew_doc = doc["rewards"]
    if not isinstance(rew_doc, dict):
        raise GameSpecError("must be keyed by agent index", field="rewards")
    rewards = np.full((n, A ** n, G, S, K), np.nan)
    for i_key, table in rew_doc.items():
        if i_key not in {str(i) for i in range(n)}:
            raise GameSpecError(f"unknown agent {i_key!r}", field=f"rewards.{i_key}")
        if not isinstance(table, dict):
            raise GameSpecError("must map keys to numbers", field=f"rewards.{i_key}")
        i = int(i_key)
        for key, r in table.items():
            fname = f"rewards.{i_key}.{key}"
            toks = split(key, n + 3, fname)
            a = joint(toks[:n], a_idx, fname)
            g = joint(toks[n:n + 1], s_idx, fname)
            w = joint(toks[n + 1:n + 2], w_idx, fname)
            t = joint(toks[n + 2:], t_idx, fname)
            if isinstance(r, bool) or not isinstance(r, (int, float)):
                raise GameSpecError("reward must be a number", field=fname)
            rewards[i, a, g, w, t] = float(r)
    if np.isnan(rewards).any():
        raise GameSpecError("reward table incomplete", field="rewards")

    pr_doc = doc["principal_reward"]
    if not isinstance(pr_doc, dict):
        raise GameSpecError("must map keys to numbers", field="principal_reward")
    principal = np.full((A ** n, G, K ** n), np.nan)
    for key, r in pr_doc.items():
        fname = f"principal_reward.{key}"
        toks = split(key, 2 * n + 1, fname)
        a = joint(toks[:n], a_idx, fname)
        g = joint(toks[n:n + 1], s_idx, fname)
        t = joint(toks[n + 1:], t_idx, fname)
        if isinstance(r, bool) or not isinstance(r, (int, float)):
            raise GameSpecError("reward must be a number", field=fname)
        principal[a, g, t] = float(r)
    if np.isnan(principal).any():
        raise GameSpecError("principal reward table incomplete", field="principal_reward")

    for name in ("gamma", "gamma_hat"):
        if isinstance(doc[name], bool) or not isinstance(doc[name], (int, float)):
            raise GameSpecError("must be a number", field=name)

    return GameSpec(
        n_agents=n, states=states, actions=actions, types=types, signals=signals,
        n_sources=m, principal_source=k, transition=transition, state_init=state_init,
        type_prior=type_prior, nonprincipal_dist=nonprincipal, rewards=rewards,
        principal_reward=principal, gamma=float(doc["gamma"]), gamma_hat=float(doc["gamma_hat"]),
    )


def load_game(text: str) -> GameSpec:
    """Parse and validate a game-spec JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameSpecError(exc.msg, line=exc.lineno) from None
    return game_from_dict(doc)


def load_game_file(path) -> GameSpec:
    with open(path, encoding="utf-8") as fh:
        return load_game(fh.read())


def game_to_dict(game: GameSpec) -> dict:
    n = game.n_agents
    ja = [game.joint_action_label(a) for a in range(game.n_joint_actions)]
    jt = [game.joint_type_label(t) for t in range(game.n_joint_types)]
    transition = {
        g_lab: {ja[a]: [float(p) for p in game.transition[g, a]] for a in range(len(ja))}
        for g, g_lab in enumerate(game.states)
    }
    parts = (game.n_sources - 1) * n
    nonprincipal = {}
    for w, combo in enumerate(joint_profiles(game.n_signals, parts)):
        p = float(game.nonprincipal_dist[w])
        if p != 0.0:
            nonprincipal["|".join(game.signals[s] for s in combo)] = p
    rewards = {}
    for i in range(n):
        table = {}
        for a in range(len(ja)):
            for g, g_lab in enumerate(game.states):
                for w, w_lab in enumerate(game.signals):
                    for t, t_lab in enumerate(game.types):
                        table[f"{ja[a]}|{g_lab}|{w_lab}|{t_lab}"] = float(game.rewards[i, a, g, w, t])
        rewards[str(i)] = table
    principal = {
        f"{ja[a]}|{g_lab}|{jt[t]}": float(game.principal_reward[a, g, t])
        for a in range(len(ja)) for g, g_lab in enumerate(game.states) for t in range(len(jt))
    }
    return {
        "agents": n,
        "states": list(game.states),
        "actions": list(game.actions),
        "types": list(game.types),
        "signals": list(game.signals),
        "sources": {"count": game.n_sources, "principal": game.principal_source},
        "transition": transition,
        "state_init": [float(p) for p in game.state_init],
        "type_prior": [float(p) for p in game.type_prior],
        "nonprincipal_dist": nonprincipal,
        "rewards": rewards,
        "principal_reward": principal,
        "gamma": game.gamma,
        "gamma_hat": game.gamma_hat,
    }


def serialize_game(game: GameSpec) -> str:
    return json.dumps(game_to_dict(game), indent=1) + "\n"


def games_equal(a: GameSpec, b: GameSpec) -> bool:
    """Bit-exact equality of every label and table."""
    scalars = ("n_agents", "states", "actions", "types", "signals", "n_sources",
               "principal_source", "gamma", "gamma_hat")
    if any(getattr(a, s) != getattr(b, s) for s in scalars):
        return False
    arrays = ("transition", "state_init", "type_prior", "nonprincipal_dist", "rewards", "principal_reward")
    return all(np.array_equal(getattr(a, s), getattr(b, s)) for s in arrays)


# ---------------------------------------------------------------------------
# deviation spaces

def count_deviations(game: GameSpec):
    n_pol = game.n_actions ** (game.n_states * game.n_signals * game.n_types)
    n_sel = game.n_sources ** (game.n_states * game.n_batches * game.n_types)
    return n_pol, n_sel


def _lex_tables(base, shape):
    size = int(np.prod(shape))
    for combo in itertools.product(range(base), repeat=size):
        arr = np.array(combo, dtype=np.int64).reshape(shape)
        arr.setflags(write=False)
        yield arr


def enumerate_deviations(game: GameSpec, agent: int, cap: int = DEFAULT_DEVIATION_CAP):
    """All deterministic policy and selection tables for one agent.

    Policy deviations map (g, selected signal, own type) -> action, shape (G, S, K).
    Selection deviations map (g, batch, own type) -> batch position, shape (G, S**m, K).
    Both lists are in lexicographic order over the flattened table.
    """
    if not 0 <= agent < game.n_agents:
        raise IndexError(f"agent {agent} out of range")
    n_pol, n_sel = count_deviations(game)
    if n_pol > cap:
        raise DeviationCapError(f"{n_pol} policy deviations exceed cap {cap}")
    if n_sel > cap:
        raise DeviationCapError(f"{n_sel} selection deviations exceed cap {cap}")
    pol = list(_lex_tables(game.n_actions, (game.n_states, game.n_signals, game.n_types)))
    sel = list(_lex_tables(game.n_sources, (game.n_states, game.n_batches, game.n_types)))
    return pol, sel


def policy_deviation_array(game: GameSpec, cap: int = DEFAULT_DEVIATION_CAP) -> np.ndarray:
    """Stacked policy deviations, shape (D, G, S, K), same order as enumerate_deviations."""
    n_pol, _ = count_deviations(game)
    if n_pol > cap:
        raise DeviationCapError(f"{n_pol} policy deviations exceed cap {cap}")
    size = game.n_states * game.n_signals * game.n_types
    flat = joint_profiles(game.n_actions, size)
    return flat.reshape(-1, game.n_states, game.n_signals, game.n_types)


def selection_deviation_array(game: GameSpec, cap: int = DEFAULT_DEVIATION_CAP) -> np.ndarray:
    _, n_sel = count_deviations(game)
    if n_sel > cap:
        raise DeviationCapError(f"{n_sel} selection deviations exceed cap {cap}")
    size = game.n_states * game.n_batches * game.n_types
    flat = joint_profiles(game.n_sources, size)
    return flat.reshape(-1, game.n_states, game.n_batches, game.n_types)
