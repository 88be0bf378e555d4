import logging
from dataclasses import dataclass
from os import PathLike

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from ..classifier.weighted import FIXED_POINT_MAX_ITERS, FIXED_POINT_TOLERANCE, check_support
from ..solvers import iterate_to_fixed_point, solve_policy_values
from ..tabular import EmpiricalModel, TabularMdp, TabularPolicy
from ..utils import PreconditionError

logger = logging.getLogger(__name__)

_SLICE_ATOL = 1e-9


@dataclass(frozen=True, eq=False)
class GoalConditionedQ:
    """Goal-conditioned critic Q[s, a, g].

    Attributes:
      values: Non-negative values; +inf marks actions the policy never takes.
      goal_dist: Distribution p_g over goal states.
    """

    values: NDArray[np.float64]
    goal_dist: NDArray[np.float64]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        goal_dist = np.asarray(self.goal_dist, dtype=np.float64)
        if values.ndim != 3 or values.shape[2] != goal_dist.shape[0]:
            raise PreconditionError(
                f"values shape {values.shape} does not match {goal_dist.shape[0]} goals"
            )
        if np.isnan(values).any() or (values < 0).any():
            raise PreconditionError("goal-conditioned values must be non-negative")
        if (goal_dist < 0).any() or abs(goal_dist.sum() - 1.0) > _SLICE_ATOL:
            raise PreconditionError("goal_dist must sum to 1")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "goal_dist", goal_dist)

    def to_frame(self) -> pd.DataFrame:
        """Long format with columns s, a, s_g, value."""
        s, a, g = np.indices(self.values.shape)
        return pd.DataFrame(
            {"s": s.ravel(), "a": a.ravel(), "s_g": g.ravel(), "value": self.values.ravel()}
        )

    def to_csv(self, path: str | PathLike) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.17g")


@dataclass(frozen=True, eq=False)
class GoalConditionedPolicy:
    """π[s, a, g]; every (s, g) slice is a distribution over actions."""

    probs: NDArray[np.float64]

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 3:
            raise PreconditionError(f"policy must have shape (S, A, G), got {probs.shape}")
        if (probs < 0).any() or not np.allclose(probs.sum(axis=1), 1.0, atol=_SLICE_ATOL):
            raise PreconditionError("every (s, g) slice must be a probability vector")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_marginal(cls, policy: TabularPolicy, num_goals: int) -> "GoalConditionedPolicy":
        return cls(np.repeat(policy.probs[:, :, None], num_goals, axis=2))

    @classmethod
    def from_goal_policies(cls, policies: list[TabularPolicy]) -> "GoalConditionedPolicy":
        return cls(np.stack([p.probs for p in policies], axis=2))

    def for_goal(self, goal: int) -> TabularPolicy:
        return TabularPolicy(self.probs[:, :, goal])


def _uniform_goals(mdp: TabularMdp, goal_dist: NDArray | None) -> NDArray:
    if goal_dist is None:
        return np.full(mdp.num_states, 1.0 / mdp.num_states)
    return np.asarray(goal_dist, dtype=np.float64)


def goal_hit_reward(mdp: TabularMdp) -> NDArray[np.float64]:
    """(1 - γ) p(s' = g | s, a), shaped (S, A, G)."""
    return (1.0 - mdp.discount) * mdp.transition


def gc_discounted_occupancy(
    mdp: TabularMdp,
    policy_marginal: TabularPolicy,
    goal_dist: NDArray | None = None,
) -> GoalConditionedQ:
    """
    Discounted future-state density of the marginal policy, one column per goal.

    Solves Q(s, a, g) = (1 - γ) p(s' = g | s, a) + γ E_{s', a' ~ β}[Q(s', a', g)]
    for every goal at once. Each (s, a) row sums to one over goals.
    """
    policy_marginal.check_compatible(mdp.num_states, mdp.num_actions)
    values = solve_policy_values(
        mdp.transition, goal_hit_reward(mdp), policy_marginal.probs, mdp.discount
    )
    return GoalConditionedQ(np.maximum(values, 0.0), _uniform_goals(mdp, goal_dist))


def gc_critic_reg_fixed_point(
    mdp: TabularMdp,
    dataset_model: EmpiricalModel,
    policy: GoalConditionedPolicy,
    goal_dist: NDArray | None = None,
) -> GoalConditionedQ:
    """
    Fixed point of the critic-regularized goal-conditioned classifier.

    Iterates Q <- [(1 - γ) p(s' = g | s, a) + γ E_{s'}[Σ_a' π(a'|s', g) Q(s', a', g)]]
    · β̂(a|s) / π(a|s, g), which converges to Q^β̂(s, a, g) β̂(a|s) / π(a|s, g).

    Parameters
    ----------
    mdp : TabularMdp
        Dynamics of the goal-hit rewards and the backup.
    dataset_model : EmpiricalModel
        Supplies the marginal behavior policy β̂(a|s).
    policy : GoalConditionedPolicy
        Must put mass only on actions in the support of β̂(·|s).
    goal_dist : NDArray, optional
        p_g; uniform over states by default.

    Returns
    -------
    GoalConditionedQ
        +inf where π(a|s, g) = 0.
    """
    shape = (mdp.num_states, mdp.num_actions, mdp.num_states)
    if policy.probs.shape != shape:
        raise PreconditionError(f"policy shape {policy.probs.shape} does not match {shape}")
    beta = dataset_model.behavior_policy.probs
    if beta.shape != shape[:2]:
        raise PreconditionError("dataset model and MDP disagree on the state-action space")
    pi = policy.probs
    check_support(pi, np.broadcast_to(beta[:, :, None], shape))
    active = pi > 0
    ratio = np.divide(beta[:, :, None], pi, out=np.zeros(shape), where=active)
    reward = goal_hit_reward(mdp)

    def update(q: NDArray) -> NDArray:
        next_values = np.where(active, pi * np.where(active, q, 0.0), 0.0).sum(axis=1)
        backup = reward + mdp.discount * mdp.expected_next(next_values)
        return np.where(active, backup * ratio, np.inf)

    q, iterations = iterate_to_fixed_point(
        update,
        np.where(active, 0.0, np.inf),
        FIXED_POINT_TOLERANCE,
        FIXED_POINT_MAX_ITERS,
        "goal-conditioned critic-reg fixed point",
        relative=True,
    )
    logger.debug("Goal-conditioned fixed point after %s iterations", iterations)
    return GoalConditionedQ(q, _uniform_goals(mdp, goal_dist))


def gc_one_step_objective(
    q_beta: GoalConditionedQ, behavior: TabularPolicy, policy: GoalConditionedPolicy
) -> NDArray[np.float64]:
    """E_π[log Q^β + log β(a|s) - log π(a|s, g)] per (s, g)."""
    pi = policy.probs
    active = pi > 0
    beta = np.broadcast_to(behavior.probs[:, :, None], pi.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.log(q_beta.values) + np.log(beta) - np.log(pi)
    return (pi * np.where(active, terms, 0.0)).sum(axis=1)


def gc_log_q_objective(q: GoalConditionedQ, policy: GoalConditionedPolicy) -> NDArray[np.float64]:
    """E_π[log Q] per (s, g), skipping actions with π = 0."""
    pi = policy.probs
    active = pi > 0
    with np.errstate(divide="ignore"):
        terms = np.where(active, np.log(np.where(active, q.values, 1.0)), 0.0)
    return (pi * terms).sum(axis=1)
