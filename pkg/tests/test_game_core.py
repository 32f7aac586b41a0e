import json

import numpy as np
import pytest

from conftest import FIXTURES
from markov_infodesign import generators as gen
from markov_infodesign.game_core import (DeviationCapError, GameSpecError, Policy, SelectionRule,
                                         SignalingRule, count_deviations, enumerate_deviations,
                                         games_equal, joint_profiles, load_game, policy_deviation_array,
                                         selection_deviation_array, serialize_game)


def fixture_doc(name="pd2"):
    return json.loads((FIXTURES / f"{name}.game").read_text())


@pytest.mark.parametrize("name", ["pd2", "pd_static", "chicken", "persuasion", "chain2", "markov2",
                                  "markov2_plain"])
def test_fixtures_round_trip(name):
    text = (FIXTURES / f"{name}.game").read_text()
    game = load_game(text)
    assert serialize_game(game) == text
    assert games_equal(load_game(serialize_game(game)), game)


def test_random_games_round_trip(rng):
    for _ in range(10):
        game = gen.random_game(rng, n_agents=2, n_sources=2, n_signals=2)
        assert games_equal(load_game(serialize_game(game)), game)


def test_joint_profiles_order():
    tab = joint_profiles(3, 2)
    assert tab.shape == (9, 2)
    assert tab[5].tolist() == [1, 2]          # agent 0 is the most significant digit


def test_unknown_key_rejected():
    doc = fixture_doc()
    doc["colour"] = "blue"
    with pytest.raises(GameSpecError, match="colour"):
        load_game(json.dumps(doc))


@pytest.mark.parametrize("field", ["transition", "rewards", "gamma"])
def test_missing_key_named(field):
    doc = fixture_doc()
    del doc[field]
    with pytest.raises(GameSpecError) as exc:
        load_game(json.dumps(doc))
    assert exc.value.field == field


def test_bad_transition_row_named():
    doc = fixture_doc()
    doc["transition"]["g0"]["cooperate|cooperate"] = [0.5]
    with pytest.raises(GameSpecError) as exc:
        load_game(json.dumps(doc))
    assert "cooperate|cooperate" in exc.value.field


def test_non_stochastic_transition_rejected():
    doc = fixture_doc("markov2")
    doc["transition"]["g0"]["a0"] = [0.7, 0.7]
    with pytest.raises(GameSpecError):
        load_game(json.dumps(doc))


@pytest.mark.parametrize("gamma", [1.0, -0.1])
def test_discount_range(gamma):
    doc = fixture_doc()
    doc["gamma"] = gamma
    with pytest.raises(GameSpecError) as exc:
        load_game(json.dumps(doc))
    assert exc.value.field == "gamma"


def test_json_syntax_error_has_line():
    with pytest.raises(GameSpecError) as exc:
        load_game('{\n "agents": 1,\n oops}')
    assert exc.value.line == 3


def test_unknown_label_named():
    doc = fixture_doc()
    doc["rewards"]["0"]["sing|defect|g0|s0|t0"] = 1.0
    with pytest.raises(GameSpecError, match="sing"):
        load_game(json.dumps(doc))


def test_deviation_counts(load_fixture):
    game = load_fixture("markov2")
    n_pol, n_sel = count_deviations(game)
    assert n_pol == 2 ** (2 * 2 * 2)
    assert n_sel == 2 ** (2 * 4 * 2)
    pol, sel = enumerate_deviations(game, 0)
    assert len(pol) == n_pol and len(sel) == n_sel
    assert np.array_equal(np.stack(pol), policy_deviation_array(game))
    assert np.array_equal(np.stack(sel), selection_deviation_array(game))


def test_deviation_cap(load_fixture):
    game = load_fixture("markov2")
    with pytest.raises(DeviationCapError):
        enumerate_deviations(game, 0, cap=100)
    with pytest.raises(IndexError):
        enumerate_deviations(game, 3)


def test_strategy_objects_validate(load_fixture):
    game = load_fixture("pd2")
    with pytest.raises(ValueError):
        SignalingRule(np.full((1, 1, 4), 0.3))
    with pytest.raises(ValueError):
        Policy(np.ones((2, 1, 2, 1)))
    assert SelectionRule.obedient(game).is_obedient(game)
    joint = Policy.uniform(game).joint(game)
    assert joint.shape == (1, 4, 1, 4)
    np.testing.assert_allclose(joint.sum(-1), 1.0)
