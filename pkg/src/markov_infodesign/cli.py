"""Command-line front end: `infodesign <command> --game FILE ...`.

Exit codes: 0 success or verified, 1 input error, 2 not an equilibrium,
3 infeasible. Reports are deterministic JSON; wall-clock timestamps go to a
separate `*.meta.json` sidecar.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from . import design as dsg
from . import dynamics as dyn
from . import equilibrium as eqm
from . import formats
from . import sim
from .game_core import GameSpecError, SelectionRule, load_game_file, serialize_game

SCHEMA_VERSION = "1.0"
EXIT_OK, EXIT_INPUT, EXIT_NOT_EQ, EXIT_INFEASIBLE = 0, 1, 2, 3


class InputError(Exception):
    pass


def report_schema() -> dict:
    text = resources.files("markov_infodesign").joinpath("schema/report.schema.json").read_text("utf-8")
    return json.loads(text)


def _dumps(obj) -> str:
    return json.dumps(eqm._jsonable(obj), sort_keys=True, indent=1, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# CSV tables

def _csv_table(game, table: np.ndarray, axes, value_name: str = "value") -> str:
    labels = [formats._labels(game, a) for a in axes]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(axes) + [value_name])
    for idx in np.ndindex(*table.shape):
        w.writerow([labels[d][i] for d, i in enumerate(idx)] + [repr(float(table[idx]))])
    return buf.getvalue()


OCCUPANCY_AXES = ("joint_type", "state", "joint_action", "signal_profile", "signal_profile")
J_AXES = ("agent", "joint_type", "state")
V_AXES = ("agent", "joint_type", "state", "signal", "signal")
Q_AXES = ("agent", "joint_type", "state", "signal", "joint_action")


# ---------------------------------------------------------------------------
# input loading

def _load_game(args):
    if not args.game:
        raise InputError("--game is required")
    if not Path(args.game).is_file():
        raise InputError(f"game file not found: {args.game}")
    return load_game_file(args.game)


def _load_profile(game, args):
    if not args.profile:
        raise InputError("--profile is required")
    if not Path(args.profile).is_file():
        raise InputError(f"profile file not found: {args.profile}")
    alpha, beta, pi = formats.profile_from_dict(game, formats.load_json(args.profile, "profile"))
    if args.rule:
        alpha = _load_rule(game, args)
    return alpha, beta, pi


def _load_rule(game, args):
    if not Path(args.rule).is_file():
        raise InputError(f"rule file not found: {args.rule}")
    return formats.rule_from_dict(game, formats.load_json(args.rule, "rule"))


def _load_goal(game, args):
    if not args.goal:
        raise InputError("--goal is required")
    if not Path(args.goal).is_file():
        raise InputError(f"goal file not found: {args.goal}")
    return formats.goal_from_dict(game, formats.load_json(args.goal, "goal"))


# ---------------------------------------------------------------------------
# commands; each returns (exit code, status, result dict, extra files)

def cmd_validate(game, args):
    result = {"agents": game.n_agents, "states": len(game.states), "actions": len(game.actions),
              "types": len(game.types), "signals": len(game.signals), "sources": game.n_sources,
              "gamma": game.gamma, "gamma_hat": game.gamma_hat,
              "reward_bound": game.reward_bound,
              "canonical": json.loads(serialize_game(game))}
    return EXIT_OK, "valid", result, {}


def cmd_values(game, args):
    alpha, beta, pi = _load_profile(game, args)
    vals = dyn.compute_values(game, alpha, beta, pi, tol=args.tol * 1e-4)
    occ = dyn.occupancy_from_profile(game, alpha, beta, pi)
    result = {"J": vals.J, "V": vals.V, "Q": vals.Q, "ex_ante": vals.ex_ante(game),
              "bellman_residual": vals.residual, "iterations": vals.iterations,
              "occupancy": occ.table, "occupancy_mass": occ.mass(),
              "flow_residual": dyn.flow_residual(game, alpha, occ)}
    files = {}
    if args.format == "csv":
        files = {"J.csv": _csv_table(game, vals.J, J_AXES),
                 "V.csv": _csv_table(game, vals.V, V_AXES),
                 "Q.csv": _csv_table(game, vals.Q, Q_AXES),
                 "occupancy.csv": _csv_table(game, occ.table, OCCUPANCY_AXES)}
    return EXIT_OK, "computed", result, files


def cmd_verify(game, args):
    if args.bmce:
        kappa = _load_goal(game, args)
        report = eqm.check_bmce(game, kappa, args.tol)
        result = {"report": report.to_dict()}
    else:
        alpha, beta, pi = _load_profile(game, args)
        if args.o_pbme:
            kappa = _load_goal(game, args) if args.goal else None
            report = eqm.check_o_pbme(game, alpha, beta, pi, None, kappa, args.tol, args.tdev)
        else:
            report = eqm.check_pbme(game, alpha, beta, pi, None, args.tol)
        slacks = dsg._maybe_slacks(game, alpha, beta, pi, 4096)
        eps = dsg.epsilon_certificate(game, alpha, beta, pi)
        result = {"report": report.to_dict(),
                  "slacks": slacks.to_dict() if slacks else None,
                  "epsilon": eps.to_dict()}
    ok = report.is_equilibrium
    return (EXIT_OK if ok else EXIT_NOT_EQ), ("verified" if ok else "not-equilibrium"), result, {}


def _design_outcome(res: dsg.DesignResult):
    if res.status == "verified-OIL":
        return EXIT_OK
    return EXIT_INFEASIBLE if res.status == "infeasible" else EXIT_NOT_EQ


def _design_files(game, res, args, lp=None):
    files = {}
    if res.alpha is not None:
        files["profile.json"] = _dumps(formats.profile_to_dict(
            game, res.alpha, SelectionRule.obedient(game), res.policy))
        if args.format == "csv":
            files["occupancy.csv"] = _csv_table(game, res.occupancy.table, OCCUPANCY_AXES)
    if lp is not None:
        files["lp.txt"] = lp.to_text()
    return files


def cmd_design(game, args):
    kappa = _load_goal(game, args)
    res = dsg.design_oil(game, kappa, tol=args.tol, restarts=args.restarts, seed=args.seed,
                         t_dev=args.tdev)
    result = res.to_dict()
    result["principal_value"] = dsg.principal_payoff(game, kappa)
    lp = dsg.build_oil_lp(game, kappa, tol=args.tol)
    return _design_outcome(res), res.status, result, _design_files(game, res, args, lp)


def cmd_select_goal(game, args):
    kappa, value, res = dsg.select_goal(game, args.tol, restarts=args.restarts, seed=args.seed,
                                        t_dev=args.tdev)
    result = {"goal": kappa.table, "principal_value": value, "design": res.to_dict()}
    files = _design_files(game, res, args)
    files["goal.json"] = _dumps(formats.goal_to_dict(game, kappa))
    return _design_outcome(res), res.status, result, files


def cmd_directify(game, args):
    alpha, beta, pi = _load_profile(game, args)
    try:
        direct = dsg.directify(game, alpha, beta, pi, args.tol)
    except dsg.NotEquilibriumError as exc:
        return EXIT_NOT_EQ, "not-equilibrium", {"input_report": exc.report.to_dict()}, {}
    obedient = SelectionRule.obedient(game)
    before = eqm.induced_action_marginal(game, alpha, beta, pi)
    after = eqm.induced_action_marginal(game, direct, obedient, pi)
    report = eqm.check_pbme(game, direct, obedient, pi, None, args.tol)
    result = {"rule": direct.table, "marginal_gap": float(np.max(np.abs(before - after))),
              "report": report.to_dict()}
    files = {"rule.json": _dumps(formats.rule_to_dict(game, direct))}
    ok = report.is_equilibrium
    return (EXIT_OK if ok else EXIT_NOT_EQ), ("verified" if ok else "not-equilibrium"), result, files


def cmd_simulate(game, args):
    alpha, beta, pi = _load_profile(game, args)
    horizon = sim.default_horizon(game)
    batch = sim.simulate(game, alpha, beta, pi, args.rollouts, horizon, args.seed)
    est, counts = sim.estimate_occupancy(batch, game.gamma, game)
    occ = dyn.occupancy_from_profile(game, alpha, beta, pi)
    weights = counts / counts.sum()
    l1 = float((1 - game.gamma) * np.einsum("t,t...->...", weights, np.abs(est.table - occ.table)).sum())
    returns = batch.discounted_returns(game.gamma)
    se = returns.std(axis=0, ddof=1) / np.sqrt(len(returns)) if len(returns) > 1 else np.zeros(game.n_agents)
    result = {"generator": sim.GENERATOR, "horizon": horizon, "rollouts": args.rollouts,
              "type_counts": counts, "mean_return": returns.mean(axis=0), "return_se": se,
              "analytic_return": dyn.compute_values(game, alpha, beta, pi).ex_ante(game),
              "occupancy_l1": l1, "occupancy_estimate": est.table}
    files = {}
    if args.trajectories:
        files["trajectories.jsonl"] = sim.to_jsonl(game, batch[:args.trajectories])
    if args.format == "csv":
        files["occupancy_estimate.csv"] = _csv_table(game, est.table, OCCUPANCY_AXES)
    return EXIT_OK, "simulated", result, files


COMMANDS = {"validate": cmd_validate, "values": cmd_values, "verify": cmd_verify,
            "design": cmd_design, "select-goal": cmd_select_goal, "directify": cmd_directify,
            "simulate": cmd_simulate}


# ---------------------------------------------------------------------------
# driver

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="infodesign", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--game", required=True)
        p.add_argument("--goal")
        p.add_argument("--rule")
        p.add_argument("--profile")
        p.add_argument("--tol", type=float, default=1e-6)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--rollouts", type=int, default=10000)
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--tdev", type=int, default=2)
        p.add_argument("--restarts", type=int, default=16)
        if name == "verify":
            mode = p.add_mutually_exclusive_group()
            mode.add_argument("--o-pbme", action="store_true")
            mode.add_argument("--bmce", action="store_true")
        if name == "simulate":
            p.add_argument("--trajectories", type=int, default=0,
                           help="export this many episodes as JSON lines")
    return parser


def _config(args) -> dict:
    keys = ("command", "game", "goal", "rule", "profile", "tol", "seed", "rollouts", "format",
            "tdev", "restarts", "o_pbme", "bmce", "trajectories")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def run(args) -> int:
    try:
        if not args.tol > 0:
            raise InputError("--tol must be positive")
        if args.rollouts < 1:
            raise InputError("--rollouts must be positive")
        if args.tdev < 0 or args.restarts < 0:
            raise InputError("--tdev and --restarts must be non-negative")
        game = _load_game(args)
        code, status, result, files = COMMANDS[args.command](game, args)
    except (InputError, GameSpecError, FileNotFoundError) as exc:
        code, status, result, files = EXIT_INPUT, "input-error", {"error": str(exc)}, {}
        print(f"error: {exc}", file=sys.stderr)
    report = {"schema_version": SCHEMA_VERSION, "tool": "markov-infodesign", "version": __version__,
              "command": args.command, "config": _config(args),
              "tolerances": {"tol": args.tol, "support": eqm.SUPPORT_TOL, "zero_mass": dyn.ZERO_MASS},
              "status": status, "exit_code": code, "result": result}
    text = _dumps(report)
    jsonschema.validate(json.loads(text), report_schema())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(text, encoding="utf-8")
        for name, body in sorted(files.items()):
            (out / name).write_text(body, encoding="utf-8")
        meta = {"created": datetime.now(timezone.utc).isoformat(), "report": "report.json"}
        (out / "report.meta.json").write_text(json.dumps(meta, sort_keys=True) + "\n", encoding="utf-8")
        print(f"{args.command}: {status} (exit {code}) -> {out / 'report.json'}")
    else:
        sys.stdout.write(text)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
