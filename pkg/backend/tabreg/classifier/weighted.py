import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..solvers import QTable, iterate_to_fixed_point, td_target
from ..tabular import EmpiricalModel, TabularPolicy
from ..utils import PreconditionError

logger = logging.getLogger(__name__)

FIXED_POINT_TOLERANCE = 1e-12
FIXED_POINT_MAX_ITERS = 100_000


@dataclass(frozen=True)
class LambdaWeights:
    """Mixture coefficients of the λ-weighted losses.

    Attributes:
      lambda_critic: Weight of β̂ in the critic's negative-action distribution.
      lambda_td: Weight of β̂ in the TD backup policy.
      lambda_kl: Weight of β̂ inside the log of the actor's KL term.
    """

    lambda_critic: float = 0.0
    lambda_td: float = 0.0
    lambda_kl: float = 0.0

    def __post_init__(self):
        for name in ("lambda_critic", "lambda_td", "lambda_kl"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise PreconditionError(f"{name} must lie in [0,1], got {value}")

    @classmethod
    def tied(cls, value: float) -> "LambdaWeights":
        return cls(value, value, value)


def mix_probs(pi: NDArray, beta: NDArray, lam: float) -> NDArray[np.float64]:
    return (1.0 - lam) * pi + lam * beta


def lambda_mixture(pi: TabularPolicy, beta: TabularPolicy, lam: float) -> TabularPolicy:
    """(1 - λ) π + λ β, row by row."""
    if not 0.0 <= lam <= 1.0:
        raise PreconditionError(f"mixture weight must lie in [0,1], got {lam}")
    return TabularPolicy(mix_probs(pi.probs, beta.probs, lam))


def check_support(policy_probs: NDArray, behavior_probs: NDArray, what: str = "π") -> None:
    violation = (policy_probs > 0) & (behavior_probs <= 0)
    if violation.any():
        states = sorted({int(s) for s in np.argwhere(violation)[:, 0]})
        raise PreconditionError(
            f"{what} puts mass on actions outside the support of β̂ at states {states}"
        )


def log_q_objective(policy_probs: NDArray, q: NDArray) -> NDArray[np.float64]:
    """E_π[log Q] per state; entries with π = 0 (and their sentinels) are skipped."""
    active = policy_probs > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(active, np.log(np.where(active, q, 1.0)), 0.0)
    return (policy_probs * terms).sum(axis=1)


def _importance_weighted_fixed_point(
    model: EmpiricalModel,
    backup: TabularPolicy,
    negatives: NDArray,
    name: str,
) -> QTable:
    beta = model.behavior_policy.probs
    active = negatives > 0
    ratio = np.divide(beta, negatives, out=np.zeros_like(beta), where=active)
    mdp = model.as_mdp()
    reward_scale = float(np.abs(mdp.reward).max())
    bound = 1e8 * max(1.0, reward_scale / (1.0 - mdp.discount)) * max(1.0, ratio.max())

    def update(q: NDArray) -> NDArray:
        return np.where(active, td_target(mdp, q, backup).values * ratio, np.inf)

    q, _ = iterate_to_fixed_point(
        update,
        np.where(active, 0.0, np.inf),
        FIXED_POINT_TOLERANCE,
        FIXED_POINT_MAX_ITERS,
        name,
        bound=bound,
        relative=True,
    )
    return q


def critic_reg_fixed_point(model: EmpiricalModel, policy: TabularPolicy) -> QTable:
    """
    Fixed point of the critic-regularized classifier loss for a fixed π.

    Iterates Q <- y^{π, Q} β̂ / π. Reparametrizing Q̃ = Q π / β̂ turns this into
    policy evaluation of β̂, so the limit is Q^β̂ β̂ / π. Entries with π = 0 carry
    a +inf sentinel and never enter an expectation.
    """
    policy.check_compatible(model.num_states, model.num_actions)
    check_support(policy.probs, model.behavior_policy.probs)
    return _importance_weighted_fixed_point(
        model, policy, policy.probs, "critic-regularized fixed point"
    )


def critic_reg_direct(q_beta: NDArray, behavior: NDArray, policy: NDArray) -> QTable:
    """Q^β̂ β̂ / π with the +inf sentinel where π = 0."""
    active = policy > 0
    ratio = np.divide(behavior, policy, out=np.zeros_like(policy), where=active)
    return np.where(active, q_beta * ratio, np.inf)


def lambda_critic_fixed_point(
    model: EmpiricalModel, policy: TabularPolicy, weights: LambdaWeights
) -> QTable:
    """
    Fixed point of the λ-weighted critic.

    Iterates Q <- y^{mix_TD, Q} β̂ / mix_critic with mix_x = (1 - λ_x) π + λ_x β̂.
    With λ_critic = λ_TD = λ the limit is Q^β̂ β̂ / ((1 - λ) π + λ β̂). Other
    combinations are iterated as given and may diverge.
    """
    policy.check_compatible(model.num_states, model.num_actions)
    beta = model.behavior_policy.probs
    check_support(policy.probs, beta)
    if weights.lambda_critic != weights.lambda_td:
        logger.debug(
            "lambda_critic=%s differs from lambda_td=%s; no closed form applies",
            weights.lambda_critic,
            weights.lambda_td,
        )
    backup = TabularPolicy(mix_probs(policy.probs, beta, weights.lambda_td))
    negatives = mix_probs(policy.probs, beta, weights.lambda_critic)
    if ((backup.probs > 0) & (negatives <= 0)).any():
        raise PreconditionError(
            "the TD backup puts mass on actions the critic never sees as negatives; "
            "use lambda_critic > 0 or lambda_td = 0"
        )
    return _importance_weighted_fixed_point(
        model, backup, negatives, "lambda-weighted critic fixed point"
    )


def lambda_one_step_objective(
    policy: TabularPolicy,
    behavior: TabularPolicy,
    q_beta: NDArray,
    lambda_kl: float,
) -> NDArray[np.float64]:
    """E_π[log Q^β + log β - log((1 - λ_KL) π + λ_KL β)] per state."""
    if not 0.0 <= lambda_kl <= 1.0:
        raise PreconditionError(f"lambda_kl must lie in [0,1], got {lambda_kl}")
    pi, beta = policy.probs, behavior.probs
    check_support(pi, beta)
    mixture = mix_probs(pi, beta, lambda_kl)
    active = pi > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.log(q_beta) + np.log(beta) - np.log(mixture)
    return (pi * np.where(active, terms, 0.0)).sum(axis=1)
