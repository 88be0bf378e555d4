from .config import SolverConfig, SolverTrace, iterate_to_fixed_point
from .exact import (
    QTable,
    TdTarget,
    policy_evaluation_exact,
    policy_expectation,
    policy_return,
    solve_policy_values,
    table_frame,
    td_target,
    value_iteration,
)
from .offline import (
    cql_soft_value_iteration,
    kl_improvement,
    one_step_rl,
    q_learning_from_dataset,
    sarsa_behavior_values,
)

__all__ = [
    "QTable",
    "SolverConfig",
    "SolverTrace",
    "TdTarget",
    "cql_soft_value_iteration",
    "iterate_to_fixed_point",
    "kl_improvement",
    "one_step_rl",
    "policy_evaluation_exact",
    "policy_expectation",
    "policy_return",
    "q_learning_from_dataset",
    "sarsa_behavior_values",
    "solve_policy_values",
    "table_frame",
    "td_target",
    "value_iteration",
]
