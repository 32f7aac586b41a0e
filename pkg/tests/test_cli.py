import json

import jsonschema
import pytest

from cli_cases import CASES
from conftest import FIXTURES
from markov_infodesign.cli import main, report_schema


@pytest.fixture
def in_fixtures(monkeypatch):
    monkeypatch.chdir(FIXTURES)


def run(argv, tmp_path, name="out"):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, json.loads((out / "report.json").read_text()), out


@pytest.mark.parametrize("case", sorted(CASES))
def test_exit_codes_and_schema(case, in_fixtures, tmp_path):
    argv, expected = CASES[case]
    code, report, out = run(argv, tmp_path)
    assert code == expected == report["exit_code"]
    jsonschema.validate(report, report_schema())
    assert report["config"]["tol"] == 1e-6 and report["version"]
    meta = json.loads((out / "report.meta.json").read_text())
    assert "created" in meta


def test_verify_opbme_gains(in_fixtures, tmp_path):
    _, report, _ = run(CASES["verify_opbme_pd2"][0], tmp_path)
    rep = report["result"]["report"]
    assert rep["worst_policy_gain"] <= 1e-6 and rep["worst_selection_gain"] <= 1e-6


def test_infeasible_design_has_certificate(in_fixtures, tmp_path):
    _, report, out = run(CASES["design_pd_static_infeasible"][0], tmp_path)
    cert = report["result"]["certificate"]
    assert cert["phase1_objective"] > 0 and len(cert["eq"]) > 0
    assert (out / "lp.txt").read_text().startswith("vars ")


def test_csv_layout(in_fixtures, tmp_path):
    _, _, out = run(CASES["values_markov2"][0], tmp_path)
    lines = (out / "J.csv").read_text().splitlines()
    assert lines[0] == "agent,joint_type,state,value"
    assert len(lines) == 1 + 1 * 2 * 2
    occ = (out / "occupancy.csv").read_text().splitlines()
    assert occ[0] == "joint_type,state,joint_action,signal_profile,signal_profile,value"


def test_bad_tolerance(in_fixtures, tmp_path):
    code, report, _ = run(["validate", "--game", "pd2.game", "--tol", "0"], tmp_path)
    assert code == 1 and "tol" in report["result"]["error"]


def test_profile_error_names_field(in_fixtures, tmp_path):
    doc = json.loads((FIXTURES / "pd2_defect.profile.json").read_text())
    del doc["policy"]["table"]["0"]["g0"]["s1"]
    bad = tmp_path / "bad.profile.json"
    bad.write_text(json.dumps(doc))
    code, report, _ = run(["verify", "--game", "pd2.game", "--profile", str(bad)], tmp_path)
    assert code == 1 and "policy.table" in report["result"]["error"]


def test_bad_game_names_field(in_fixtures, tmp_path):
    doc = json.loads((FIXTURES / "pd2.game").read_text())
    doc["gamma"] = 2.0
    bad = tmp_path / "bad.game"
    bad.write_text(json.dumps(doc))
    code, report, _ = run(["validate", "--game", str(bad)], tmp_path)
    assert code == 1 and "gamma" in report["result"]["error"]


def test_stdout_report(in_fixtures, capsys):
    assert main(["validate", "--game", "chicken.game"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["status"] == "valid"


def test_rule_override(in_fixtures, tmp_path):
    rule = tmp_path / "rule.json"
    from markov_infodesign import formats
    from markov_infodesign.game_core import SignalingRule, load_game_file
    game = load_game_file("pd2.game")
    rule.write_text(json.dumps(formats.rule_to_dict(game, SignalingRule.constant(game, 2))))
    code, report, _ = run(["values", "--game", "pd2.game", "--profile", "pd2_defect.profile.json",
                           "--rule", str(rule)], tmp_path)
    assert code == 0 and report["config"]["rule"] == str(rule)
