"""Cascade Q-learning and variance-reduced cascade Q-learning on tabular MDPs."""

from vrcq._core import (
    ConfigError,
    EpochParams,
    EpochSchedule,
    Mdp,
    ModelError,
    NumericError,
    bellman,
    complexity_measures,
    cq_run,
    exact_optimal_q,
    fit_loglog_slope,
    garnet,
    greedy_policy,
    hard_two_state,
    policy_eval_direct,
    q_learning_run,
    run_sweep,
    schedule_example1,
    schedule_expected,
    schedule_high_prob,
    vr_q_learning_run,
    vrcq_run,
)

__all__ = [
    "ConfigError",
    "EpochParams",
    "EpochSchedule",
    "Mdp",
    "ModelError",
    "NumericError",
    "bellman",
    "complexity_measures",
    "cq_run",
    "exact_optimal_q",
    "fit_loglog_slope",
    "garnet",
    "greedy_policy",
    "hard_two_state",
    "policy_eval_direct",
    "q_learning_run",
    "run_sweep",
    "schedule_example1",
    "schedule_expected",
    "schedule_high_prob",
    "vr_q_learning_run",
    "vrcq_run",
]
