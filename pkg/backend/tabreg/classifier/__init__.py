from .actor import (
    ActorState,
    ClassifierTrace,
    OscillationDetector,
    critic_reg_classifier_ac,
    one_step_classifier_ac,
    unregularized_classifier_ac,
)
from .critic import (
    ClassifierOptions,
    GradientCriticSolver,
    LogitTable,
    NewtonCriticSolver,
    ce_critic_grad,
    ce_critic_loss,
    check_nonnegative_rewards,
    classifier_policy_evaluation,
    get_critic_solver,
    pin_unsupported,
    weighted_ce_grad,
    weighted_ce_loss,
)
from .protocol import CriticSolver
from .weighted import (
    LambdaWeights,
    check_support,
    critic_reg_direct,
    critic_reg_fixed_point,
    lambda_critic_fixed_point,
    lambda_mixture,
    lambda_one_step_objective,
    log_q_objective,
    mix_probs,
)

__all__ = [
    "ActorState",
    "ClassifierOptions",
    "ClassifierTrace",
    "CriticSolver",
    "GradientCriticSolver",
    "LambdaWeights",
    "LogitTable",
    "NewtonCriticSolver",
    "OscillationDetector",
    "ce_critic_grad",
    "ce_critic_loss",
    "check_nonnegative_rewards",
    "check_support",
    "classifier_policy_evaluation",
    "critic_reg_classifier_ac",
    "critic_reg_direct",
    "critic_reg_fixed_point",
    "get_critic_solver",
    "lambda_critic_fixed_point",
    "lambda_mixture",
    "lambda_one_step_objective",
    "log_q_objective",
    "mix_probs",
    "one_step_classifier_ac",
    "pin_unsupported",
    "unregularized_classifier_ac",
    "weighted_ce_grad",
    "weighted_ce_loss",
]
