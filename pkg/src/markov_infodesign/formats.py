"""Label-keyed JSON formats for goals, signaling rules and strategy profiles.

Every table is a nested object keyed by labels, one level per axis:

goal     {"goal": {state: {joint type: {joint action: p}}}}
rule     {"rule": {state: {joint type: {signal profile: p}}}}
profile  {"rule": <rule table> | "uniform",
          "selection": "obedient" | {agent: {state: {batch: {type: position}}}},
          "policy": {"correlated": false, "table": {agent: {state: {signal: {type: {action: p}}}}}}
                  | {"correlated": true, "table": {state: {signal profile: {joint type: {joint action: p}}}}}}

Joint labels join component labels with "|" in agent order.
"""
from __future__ import annotations

import json

import numpy as np

from .game_core import GameSpec, GameSpecError, Goal, Policy, SelectionRule, SignalingRule


def _labels(game: GameSpec, kind: str):
    if kind == "agent":
        return [str(i) for i in range(game.n_agents)]
    if kind == "state":
        return list(game.states)
    if kind == "action":
        return list(game.actions)
    if kind == "type":
        return list(game.types)
    if kind == "signal":
        return list(game.signals)
    if kind == "joint_action":
        return [game.joint_action_label(a) for a in range(game.n_joint_actions)]
    if kind == "joint_type":
        return [game.joint_type_label(t) for t in range(game.n_joint_types)]
    if kind == "signal_profile":
        return [game.signal_profile_label(w) for w in range(game.n_signal_profiles)]
    if kind == "batch":
        return ["|".join(game.signals[s] for s in row) for row in game.batch_table]
    raise KeyError(kind)


GOAL_AXES = ("state", "joint_type", "joint_action")
RULE_AXES = ("state", "joint_type", "signal_profile")
SELECTION_AXES = ("agent", "state", "batch", "type")
POLICY_AXES = ("agent", "state", "signal", "type", "action")
CORRELATED_AXES = ("state", "signal_profile", "joint_type", "joint_action")


def nested_to_array(game: GameSpec, doc, axes, field: str, default=None) -> np.ndarray:
    """Read a label-keyed nested object into an array; missing leaves take `default`."""
    labels = [_labels(game, a) for a in axes]
    out = np.full([len(x) for x in labels], np.nan if default is None else default, dtype=float)

    def walk(node, depth, index, path):
        if not isinstance(node, dict):
            raise GameSpecError("expected an object", field=path)
        lookup = {lab: i for i, lab in enumerate(labels[depth])}
        for key, child in node.items():
            sub = f"{path}.{key}"
            if key not in lookup:
                raise GameSpecError(f"unknown {axes[depth]} label {key!r}", field=sub)
            if depth == len(axes) - 1:
                if isinstance(child, bool) or not isinstance(child, (int, float)):
                    raise GameSpecError("entry must be a number", field=sub)
                out[index + (lookup[key],)] = float(child)
            else:
                walk(child, depth + 1, index + (lookup[key],), sub)

    walk(doc, 0, (), field)
    if np.isnan(out).any():
        idx = np.argwhere(np.isnan(out))[0]
        path = ".".join([field] + [labels[d][i] for d, i in enumerate(idx[:-1])])
        raise GameSpecError("table incomplete", field=path)
    return out


def array_to_nested(game: GameSpec, table: np.ndarray, axes, as_int: bool = False) -> dict:
    labels = [_labels(game, a) for a in axes]

    def build(depth, index):
        if depth == len(axes) - 1:
            row = table[index]
            return {lab: (int(v) if as_int else float(v)) for lab, v in zip(labels[depth], row)}
        return {lab: build(depth + 1, index + (i,)) for i, lab in enumerate(labels[depth])}

    return build(0, ())


def goal_from_dict(game: GameSpec, doc: dict) -> Goal:
    if not isinstance(doc, dict) or "goal" not in doc:
        raise GameSpecError("missing key", field="goal")
    table = nested_to_array(game, doc["goal"], GOAL_AXES, "goal", default=0.0)
    if np.any(np.abs(table.sum(axis=-1) - 1.0) > 1e-9) or np.any(table < 0):
        raise GameSpecError("each goal row must be a probability vector", field="goal")
    return Goal(table)


def goal_to_dict(game: GameSpec, kappa: Goal) -> dict:
    return {"goal": array_to_nested(game, np.asarray(kappa.table), GOAL_AXES)}


def rule_from_doc(game: GameSpec, doc, field: str = "rule") -> SignalingRule:
    if doc == "uniform":
        return SignalingRule.uniform(game)
    table = nested_to_array(game, doc, RULE_AXES, field, default=0.0)
    try:
        return SignalingRule(table)
    except ValueError as exc:
        raise GameSpecError(str(exc), field=field) from None


def rule_from_dict(game: GameSpec, doc: dict) -> SignalingRule:
    if not isinstance(doc, dict) or "rule" not in doc:
        raise GameSpecError("missing key", field="rule")
    return rule_from_doc(game, doc["rule"])


def rule_to_dict(game: GameSpec, alpha: SignalingRule) -> dict:
    return {"rule": array_to_nested(game, np.asarray(alpha.table), RULE_AXES)}


def profile_from_dict(game: GameSpec, doc: dict):
    """Returns (alpha, beta, pi)."""
    if not isinstance(doc, dict):
        raise GameSpecError("profile must be a JSON object")
    unknown = sorted(set(doc) - {"rule", "selection", "policy"})
    if unknown:
        raise GameSpecError(f"unknown key(s) {unknown}", field=unknown[0])
    if "policy" not in doc:
        raise GameSpecError("missing key", field="policy")
    alpha = rule_from_doc(game, doc.get("rule", "uniform"))
    sel = doc.get("selection", "obedient")
    if sel == "obedient":
        beta = SelectionRule.obedient(game)
    else:
        tab = nested_to_array(game, sel, SELECTION_AXES, "selection")
        if np.any(tab != np.round(tab)) or np.any(tab < 0) or np.any(tab >= game.n_sources):
            raise GameSpecError("positions must be integers in [0, sources)", field="selection")
        beta = SelectionRule(tab.astype(np.int64))
    pol = doc["policy"]
    if not isinstance(pol, dict) or "table" not in pol:
        raise GameSpecError("must be an object with 'table'", field="policy")
    correlated = bool(pol.get("correlated", False))
    axes = CORRELATED_AXES if correlated else POLICY_AXES
    table = nested_to_array(game, pol["table"], axes, "policy.table", default=0.0)
    try:
        pi = Policy(table, correlated=correlated)
    except ValueError as exc:
        raise GameSpecError(str(exc), field="policy.table") from None
    return alpha, beta, pi


def profile_to_dict(game: GameSpec, alpha: SignalingRule, beta: SelectionRule, pi: Policy) -> dict:
    axes = CORRELATED_AXES if pi.correlated else POLICY_AXES
    sel = ("obedient" if beta.is_obedient(game)
           else array_to_nested(game, np.asarray(beta.table), SELECTION_AXES, as_int=True))
    return {"rule": array_to_nested(game, np.asarray(alpha.table), RULE_AXES),
            "selection": sel,
            "policy": {"correlated": bool(pi.correlated),
                       "table": array_to_nested(game, np.asarray(pi.table), axes)}}


def load_json(path, field: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise GameSpecError(exc.msg, field=field, line=exc.lineno) from None
