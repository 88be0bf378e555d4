import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..classifier.weighted import (
    FIXED_POINT_MAX_ITERS,
    FIXED_POINT_TOLERANCE,
    check_support,
    critic_reg_direct,
)
from ..solvers import QTable, iterate_to_fixed_point, solve_policy_values, td_target
from ..tabular import EmpiricalModel, TabularMdp, TabularPolicy
from ..utils import PreconditionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SuccessExamples:
    """Density p_e(s) of the states shown as successful outcomes."""

    density: NDArray[np.float64]

    def __post_init__(self):
        density = np.asarray(self.density, dtype=np.float64)
        if density.ndim != 1 or (density < 0).any() or abs(density.sum() - 1.0) > 1e-9:
            raise PreconditionError("success density must be a probability vector")
        object.__setattr__(self, "density", density)

    @classmethod
    def from_states(cls, states: list[int], num_states: int) -> "SuccessExamples":
        """Empirical density of a list of example states."""
        if not states:
            raise PreconditionError("at least one success example is required")
        counts = np.bincount(np.asarray(states, dtype=np.int64), minlength=num_states)
        return cls(counts / counts.sum())


def _success_mdp(mdp: TabularMdp, examples: SuccessExamples) -> TabularMdp:
    if examples.density.shape != (mdp.num_states,):
        raise PreconditionError("success density does not match the number of states")
    reward = np.repeat((1.0 - mdp.discount) * examples.density[:, None], mdp.num_actions, axis=1)
    return TabularMdp(mdp.transition, reward, mdp.discount, mdp.initial_dist, mdp.grid)


def rce_discounted_success(
    mdp: TabularMdp, behavior: TabularPolicy, examples: SuccessExamples
) -> QTable:
    """Solves Q(s, a) = (1 - γ) p_e(s) + γ E_{s', a' ~ β}[Q(s', a')] directly."""
    behavior.check_compatible(mdp.num_states, mdp.num_actions)
    success = _success_mdp(mdp, examples)
    return solve_policy_values(success.transition, success.reward, behavior.probs, mdp.discount)


def rce_critic_reg_fixed_point(
    mdp: TabularMdp,
    dataset_model: EmpiricalModel,
    policy: TabularPolicy,
    examples: SuccessExamples,
) -> QTable:
    """
    Fixed point of the critic-regularized example-based classifier.

    Iterates Q <- [(1 - γ) p_e(s) + γ E_{s'}[Σ_a' π(a'|s') Q(s', a')]] β̂(a|s) / π(a|s)
    to Q^β̂ β̂ / π; +inf where π = 0.
    """
    policy.check_compatible(mdp.num_states, mdp.num_actions)
    beta = dataset_model.behavior_policy.probs
    if beta.shape != policy.probs.shape:
        raise PreconditionError("dataset model and MDP disagree on the state-action space")
    check_support(policy.probs, beta)
    success = _success_mdp(mdp, examples)
    active = policy.probs > 0
    ratio = critic_reg_direct(np.ones_like(beta), beta, policy.probs)

    def update(q: NDArray) -> NDArray:
        return np.where(active, td_target(success, q, policy).values * ratio, np.inf)

    q, iterations = iterate_to_fixed_point(
        update,
        np.where(active, 0.0, np.inf),
        FIXED_POINT_TOLERANCE,
        FIXED_POINT_MAX_ITERS,
        "example-based critic-reg fixed point",
        relative=True,
    )
    logger.debug("Example-based fixed point after %s iterations", iterations)
    return q
