"""Information design for Bayesian Markov games: exact values, occupancy
measures, equilibrium verification, obedient design LPs and simulation."""

__version__ = "0.1.0"

from .game_core import (BeliefSystem, GameSpec, GameSpecError, Goal, Policy,
                        SelectionRule, SignalingRule, enumerate_deviations,
                        load_game, load_game_file, serialize_game)

__all__ = [
    "BeliefSystem", "GameSpec", "GameSpecError", "Goal", "Policy", "SelectionRule",
    "SignalingRule", "enumerate_deviations", "load_game", "load_game_file",
    "serialize_game", "__version__",
]
