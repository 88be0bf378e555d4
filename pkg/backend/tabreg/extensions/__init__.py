from .example_based import SuccessExamples, rce_critic_reg_fixed_point, rce_discounted_success
from .goal_conditioned import (
    GoalConditionedPolicy,
    GoalConditionedQ,
    gc_critic_reg_fixed_point,
    gc_discounted_occupancy,
    gc_log_q_objective,
    gc_one_step_objective,
    goal_hit_reward,
)

__all__ = [
    "GoalConditionedPolicy",
    "GoalConditionedQ",
    "SuccessExamples",
    "gc_critic_reg_fixed_point",
    "gc_discounted_occupancy",
    "gc_log_q_objective",
    "gc_one_step_objective",
    "goal_hit_reward",
    "rce_critic_reg_fixed_point",
    "rce_discounted_success",
]
