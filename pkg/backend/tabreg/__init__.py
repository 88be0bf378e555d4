from .classifier import (
    ClassifierOptions,
    LambdaWeights,
    classifier_policy_evaluation,
    critic_reg_classifier_ac,
    critic_reg_fixed_point,
    one_step_classifier_ac,
    unregularized_classifier_ac,
)
from .config import RunConfig, parse_config
from .experiments import (
    ExperimentReport,
    StateSubset,
    action_prob_r2,
    argmax_similarity,
    generate_random_mdp,
    run_bench,
    run_fig2,
    run_fig3,
    run_fig4,
    run_fig5,
    run_fig7,
    run_fig_cac,
    verify_theorems,
)
from .extensions import (
    GoalConditionedPolicy,
    GoalConditionedQ,
    SuccessExamples,
)
from .plotting import PolicyAnnotations, emit_policy_svg
from .solvers import (
    SolverConfig,
    cql_soft_value_iteration,
    one_step_rl,
    policy_evaluation_exact,
    q_learning_from_dataset,
    value_iteration,
)
from .tabular import (
    EmpiricalModel,
    GridworldSpec,
    TabularMdp,
    TabularPolicy,
    TransitionDataset,
    build_gridworld,
    estimate_empirical_model,
    load_preset,
    sample_trajectories,
)
from .utils import (
    ConfigError,
    ConvergenceError,
    DatasetError,
    PreconditionError,
    SolverDivergenceError,
    TabregError,
)

__all__ = [
    "ClassifierOptions",
    "ConfigError",
    "ConvergenceError",
    "DatasetError",
    "EmpiricalModel",
    "ExperimentReport",
    "GoalConditionedPolicy",
    "GoalConditionedQ",
    "GridworldSpec",
    "LambdaWeights",
    "PolicyAnnotations",
    "PreconditionError",
    "RunConfig",
    "SolverConfig",
    "SolverDivergenceError",
    "StateSubset",
    "SuccessExamples",
    "TabregError",
    "TabularMdp",
    "TabularPolicy",
    "TransitionDataset",
    "action_prob_r2",
    "argmax_similarity",
    "build_gridworld",
    "classifier_policy_evaluation",
    "cql_soft_value_iteration",
    "critic_reg_classifier_ac",
    "critic_reg_fixed_point",
    "emit_policy_svg",
    "estimate_empirical_model",
    "generate_random_mdp",
    "load_preset",
    "one_step_classifier_ac",
    "one_step_rl",
    "parse_config",
    "policy_evaluation_exact",
    "q_learning_from_dataset",
    "run_bench",
    "run_fig2",
    "run_fig3",
    "run_fig4",
    "run_fig5",
    "run_fig7",
    "run_fig_cac",
    "sample_trajectories",
    "unregularized_classifier_ac",
    "value_iteration",
    "verify_theorems",
]
