"""Oracle suite for the equivalence results between regularized critics and one-step updates."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..classifier import (
    ClassifierOptions,
    LambdaWeights,
    classifier_policy_evaluation,
    critic_reg_direct,
    critic_reg_fixed_point,
    lambda_critic_fixed_point,
    lambda_one_step_objective,
    log_q_objective,
)
from ..extensions import (
    GoalConditionedPolicy,
    SuccessExamples,
    gc_critic_reg_fixed_point,
    gc_discounted_occupancy,
    gc_log_q_objective,
    gc_one_step_objective,
    goal_hit_reward,
    rce_critic_reg_fixed_point,
    rce_discounted_success,
)
from ..solvers import iterate_to_fixed_point, policy_evaluation_exact
from ..tabular import (
    PRESET_NAMES,
    EmpiricalModel,
    TabularMdp,
    TabularPolicy,
    load_preset,
    random_policy,
    random_tabular_mdp,
)
from ..utils import PreconditionError, spawn_generators, sup_norm
from .report import ExperimentReport

logger = logging.getLogger(__name__)

IDENTITY_TOLERANCE = 1e-6
LEMMA1_TOLERANCE = 1e-3
NORMALIZATION_TOLERANCE = 1e-9
THEOREM_B_LAMBDAS = (0.0, 0.25, 0.5, 0.75, 1.0)
LONG_ITERATION_BUDGET = 100_000


@dataclass
class TheoremCounts:
    """Random instances drawn per check.

    Attributes:
      lemma1: Classifier policy evaluation vs the linear solve.
      lemma2: Importance-weighted fixed point, also used for the main identity.
      theorem_b: Instances per λ of the λ-weighted identity.
      theorem_c: Goal-conditioned instances.
      theorem_d: Example-based instances.
    """

    lemma1: int = 20
    lemma2: int = 20
    theorem_b: int = 10
    theorem_c: int = 10
    theorem_d: int = 10


@dataclass
class RandomInstance:
    mdp: TabularMdp
    behavior: TabularPolicy
    policy: TabularPolicy

    @property
    def model(self) -> EmpiricalModel:
        return EmpiricalModel.from_mdp(self.mdp, self.behavior)


def random_instance(
    rng: np.random.Generator, max_states: int, max_actions: int, discount: float = 0.9
) -> RandomInstance:
    num_states = int(rng.integers(2, max_states + 1))
    num_actions = int(rng.integers(2, max_actions + 1))
    mdp = random_tabular_mdp(rng, num_states, num_actions, discount)
    return RandomInstance(
        mdp,
        random_policy(rng, num_states, num_actions),
        random_policy(rng, num_states, num_actions),
    )


def _relative_gap(a: np.ndarray, b: np.ndarray) -> float:
    finite = np.isfinite(b)
    if not np.array_equal(finite, np.isfinite(a)):
        return np.inf
    return float((np.abs(a[finite] - b[finite]) / np.maximum(1.0, np.abs(b[finite]))).max())


def lemma1_deviation(instance: RandomInstance, options: ClassifierOptions) -> float:
    """Sup-norm gap between the classifier evaluation of π and Q^π."""
    model = instance.model
    q_cls = classifier_policy_evaluation(model, instance.policy, options)
    return sup_norm(q_cls, policy_evaluation_exact(model.as_mdp(), instance.policy))


def preset_lemma1_deviation(name: str, options: ClassifierOptions, discount: float) -> float:
    mdp = load_preset(name).build_mdp(discount)
    r_min = float(mdp.reward.min())
    if r_min < 0:
        mdp = mdp.with_reward_offset(1.0 - r_min)
    uniform = TabularPolicy.uniform(mdp.num_states, mdp.num_actions)
    return lemma1_deviation(RandomInstance(mdp, uniform, uniform), options)


def lemma2_deviations(instance: RandomInstance) -> tuple[float, float]:
    """(fixed point vs Q^β β / π, main identity gap), both maxima over states."""
    model = instance.model
    q_iter = critic_reg_fixed_point(model, instance.policy)
    q_beta = policy_evaluation_exact(instance.mdp, instance.behavior)
    direct = critic_reg_direct(q_beta, instance.behavior.probs, instance.policy.probs)
    lhs = log_q_objective(instance.policy.probs, q_iter)
    rhs = lambda_one_step_objective(instance.policy, instance.behavior, q_beta, 0.0)
    return _relative_gap(q_iter, direct), float(np.abs(lhs - rhs).max())


def theorem_b_deviation(instance: RandomInstance, lam: float) -> float:
    model = instance.model
    q_star = lambda_critic_fixed_point(model, instance.policy, LambdaWeights.tied(lam))
    q_beta = policy_evaluation_exact(instance.mdp, instance.behavior)
    lhs = log_q_objective(instance.policy.probs, q_star)
    rhs = lambda_one_step_objective(instance.policy, instance.behavior, q_beta, lam)
    return float(np.abs(lhs - rhs).max())


def _long_iteration(mdp: TabularMdp, reward: np.ndarray, behavior: TabularPolicy) -> np.ndarray:
    """Plain policy-evaluation sweeps, independent of the linear solve."""
    probs = behavior.probs.reshape(behavior.probs.shape + (1,) * (reward.ndim - 2))

    def update(q: np.ndarray) -> np.ndarray:
        return reward + mdp.discount * mdp.expected_next((probs * q).sum(axis=1))

    q, _ = iterate_to_fixed_point(
        update, np.zeros_like(reward), 1e-14, LONG_ITERATION_BUDGET, "long evaluation"
    )
    return q


def theorem_c_deviations(instance: RandomInstance, rng: np.random.Generator) -> dict[str, float]:
    mdp, behavior = instance.mdp, instance.behavior
    num_states, num_actions = mdp.num_states, mdp.num_actions
    policy = GoalConditionedPolicy.from_goal_policies(
        [random_policy(rng, num_states, num_actions) for _ in range(num_states)]
    )
    q_beta = gc_discounted_occupancy(mdp, behavior)
    q_star = gc_critic_reg_fixed_point(mdp, instance.model, policy)
    direct = np.where(
        policy.probs > 0,
        q_beta.values
        * np.divide(
            behavior.probs[:, :, None],
            policy.probs,
            out=np.zeros_like(policy.probs),
            where=policy.probs > 0,
        ),
        np.inf,
    )
    long_run = _long_iteration(mdp, goal_hit_reward(mdp), behavior)
    identity = gc_log_q_objective(q_star, policy) - gc_one_step_objective(q_beta, behavior, policy)
    return {
        "identity": float(np.abs(identity).max()),
        "fixed_point": _relative_gap(q_star.values, direct),
        "normalization": float(np.abs(q_beta.values.sum(axis=2) - 1.0).max()),
        "long_iteration": sup_norm(q_beta.values, long_run),
    }


def theorem_d_deviations(instance: RandomInstance, rng: np.random.Generator) -> dict[str, float]:
    mdp, behavior, policy = instance.mdp, instance.behavior, instance.policy
    examples = SuccessExamples(rng.dirichlet(np.ones(mdp.num_states)))
    q_beta = rce_discounted_success(mdp, behavior, examples)
    q_star = rce_critic_reg_fixed_point(mdp, instance.model, policy, examples)
    direct = critic_reg_direct(q_beta, behavior.probs, policy.probs)
    success_reward = np.repeat(
        (1.0 - mdp.discount) * examples.density[:, None], mdp.num_actions, axis=1
    )
    long_run = _long_iteration(mdp, success_reward, behavior)
    identity = log_q_objective(policy.probs, q_star) - lambda_one_step_objective(
        policy, behavior, q_beta, 0.0
    )
    return {
        "identity": float(np.abs(identity).max()),
        "fixed_point": _relative_gap(q_star, direct),
        "long_iteration": sup_norm(q_beta, long_run),
    }


def support_violation_raises(rng: np.random.Generator) -> bool:
    """A policy with mass outside β̂'s support must be rejected up front."""
    num_states, num_actions = 4, 3
    mdp = random_tabular_mdp(rng, num_states, num_actions)
    support = np.ones((num_states, num_actions), dtype=bool)
    support[0, 0] = False
    behavior = random_policy(rng, num_states, num_actions, support=support)
    policy = TabularPolicy.uniform(num_states, num_actions)
    try:
        critic_reg_fixed_point(EmpiricalModel.from_mdp(mdp, behavior), policy)
    except PreconditionError as e:
        logger.debug("Support violation rejected: %s", e)
        return True
    return False


def verify_theorems(
    seed: int,
    report: ExperimentReport,
    counts: TheoremCounts | None = None,
    options: ClassifierOptions | None = None,
    presets: Sequence[str] = PRESET_NAMES,
    discount: float = 0.95,
) -> ExperimentReport:
    """
    Runs every oracle check on seeded random instances and records the worst
    deviation of each as one assertion.
    """
    counts = counts or TheoremCounts()
    options = options or ClassifierOptions()

    def record(name: str, deviation: float, tolerance: float, instances: int) -> None:
        report.metric(f"{name}_max_deviation", deviation)
        report.metric(f"{name}_instances", instances)
        report.check(
            f"{name} deviation <= {tolerance:g}",
            deviation <= tolerance,
            tolerance,
            deviation,
            tolerance,
        )

    with report.timed("lemma1"):
        lemma1 = [
            lemma1_deviation(random_instance(rng, 10, 5), options)
            for rng in spawn_generators([seed, 1], counts.lemma1)
        ]
        lemma1 += [preset_lemma1_deviation(name, options, discount) for name in presets]
    record("lemma1", max(lemma1), LEMMA1_TOLERANCE, len(lemma1))

    with report.timed("lemma2"):
        lemma2 = [
            lemma2_deviations(random_instance(rng, 6, 4))
            for rng in spawn_generators([seed, 2], counts.lemma2)
        ]
    record("lemma2", max(d[0] for d in lemma2), IDENTITY_TOLERANCE, len(lemma2))
    record("theorem_main", max(d[1] for d in lemma2), IDENTITY_TOLERANCE, len(lemma2))

    with report.timed("theorem_b"):
        instances = [
            random_instance(rng, 6, 4) for rng in spawn_generators([seed, 3], counts.theorem_b)
        ]
        per_lambda = {
            lam: max(theorem_b_deviation(instance, lam) for instance in instances)
            for lam in THEOREM_B_LAMBDAS
        }
    report.metric("theorem_b_per_lambda", {f"{k:g}": v for k, v in per_lambda.items()})
    record("theorem_b", max(per_lambda.values()), IDENTITY_TOLERANCE, len(instances))

    with report.timed("theorem_c"):
        theorem_c = [
            theorem_c_deviations(random_instance(rng, 6, 3), rng)
            for rng in spawn_generators([seed, 4], counts.theorem_c)
        ]
    worst_c = max(max(d["identity"], d["fixed_point"]) for d in theorem_c)
    record("theorem_c", worst_c, IDENTITY_TOLERANCE, len(theorem_c))
    normalization = max(d["normalization"] for d in theorem_c)
    record("gc_normalization", normalization, NORMALIZATION_TOLERANCE, len(theorem_c))

    with report.timed("theorem_d"):
        theorem_d = [
            theorem_d_deviations(random_instance(rng, 6, 3), rng)
            for rng in spawn_generators([seed, 5], counts.theorem_d)
        ]
    worst_d = max(max(d["identity"], d["fixed_point"]) for d in theorem_d)
    record("theorem_d", worst_d, IDENTITY_TOLERANCE, len(theorem_d))
    long_gap = max(d["long_iteration"] for d in theorem_c + theorem_d)
    record("long_iteration_oracle", long_gap, IDENTITY_TOLERANCE, len(theorem_c) + len(theorem_d))

    rejected = support_violation_raises(spawn_generators([seed, 6], 1)[0])
    report.check("support violation raises a precondition error", rejected, True, rejected)
    return report
