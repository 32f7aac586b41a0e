"""CLI invocations of the golden suite: name -> (argv, expected exit code).

Paths are relative to the shipped fixtures directory.
"""

CASES = {
    "validate_pd2": (["validate", "--game", "pd2.game"], 0),
    "values_markov2": (["values", "--game", "markov2.game", "--profile", "markov2_random.profile.json",
                        "--format", "csv"], 0),
    "verify_pbme_pd2": (["verify", "--game", "pd2.game", "--profile", "pd2_defect.profile.json"], 0),
    "verify_opbme_pd2": (["verify", "--o-pbme", "--game", "pd2.game", "--profile",
                          "pd2_defect.profile.json"], 0),
    "verify_bmce_chicken_mix": (["verify", "--bmce", "--game", "chicken.game", "--goal",
                                 "chicken_mix.goal.json"], 0),
    "verify_bmce_chicken_dare": (["verify", "--bmce", "--game", "chicken.game", "--goal",
                                  "chicken_dare.goal.json"], 2),
    "design_chicken": (["design", "--game", "chicken.game", "--goal", "chicken_mix.goal.json",
                        "--format", "csv", "--restarts", "4", "--seed", "3"], 0),
    "design_pd_static_infeasible": (["design", "--game", "pd_static.game", "--goal",
                                     "pd_static_cooperate.goal.json"], 3),
    "select_goal_persuasion": (["select-goal", "--game", "persuasion.game", "--seed", "1"], 0),
    "directify_plain": (["directify", "--game", "markov2_plain.game", "--profile",
                         "markov2_plain_selective.profile.json"], 0),
    "directify_signal_dependent": (["directify", "--game", "markov2.game", "--profile",
                                    "markov2_selective.profile.json"], 2),
    "simulate_markov2": (["simulate", "--game", "markov2.game", "--profile", "markov2_random.profile.json",
                          "--rollouts", "2000", "--seed", "7", "--trajectories", "2", "--format", "csv"], 0),
    "input_error": (["values", "--game", "missing.game", "--profile", "markov2_random.profile.json"], 1),
}

SIDECAR = "report.meta.json"
