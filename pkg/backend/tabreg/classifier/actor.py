import logging
from collections import deque
from dataclasses import dataclass, field
from os import PathLike

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from ..solvers import QTable, policy_expectation
from ..tabular import EmpiricalModel, TabularPolicy
from ..utils import LOGIT_CLAMP, SolverDivergenceError, greedy_actions, row_softmax
from .critic import (
    ClassifierOptions,
    LogitTable,
    check_nonnegative_rewards,
    classifier_policy_evaluation,
    solver_for,
    weighted_ce_loss,
)
from .weighted import LambdaWeights, mix_probs

logger = logging.getLogger(__name__)


@dataclass
class ActorState:
    """Softmax actor with its exponential moving average.

    Attributes:
      policy_logits: θ[s, a]; the policy is the row softmax of θ.
      ema_policy: π̄, updated as π̄ <- (1 - η) π̄ + η π.
      ema_rate: η in (0, 1].
    """

    policy_logits: NDArray[np.float64]
    ema_policy: NDArray[np.float64]
    ema_rate: float = 0.05

    @classmethod
    def from_policy(cls, policy: TabularPolicy, ema_rate: float) -> "ActorState":
        with np.errstate(divide="ignore"):
            logits = np.maximum(np.log(policy.probs), -LOGIT_CLAMP)
        return cls(logits, row_softmax(logits), ema_rate)

    @property
    def policy(self) -> NDArray[np.float64]:
        return row_softmax(self.policy_logits)

    def ascend_log_q(self, log_q: NDArray, state_mask: NDArray, lr: float) -> None:
        """One gradient step on E_π[log Q] at the masked states."""
        pi = self.policy
        advantage = log_q - (pi * log_q).sum(axis=1, keepdims=True)
        self.policy_logits = self.policy_logits + lr * state_mask[:, None] * pi * advantage

    def take_greedy(self, q: NDArray, atol: float = 0.0) -> None:
        """Moves π to the maximizer of E_π[log Q]: the lowest-index greedy action of Q."""
        best = np.eye(q.shape[1], dtype=bool)[greedy_actions(q, atol)]
        self.policy_logits = np.where(best, 0.0, -LOGIT_CLAMP)

    def update_ema(self) -> None:
        self.ema_policy = (1.0 - self.ema_rate) * self.ema_policy + self.ema_rate * self.policy

    @property
    def drift(self) -> float:
        return float(np.abs(self.policy - self.ema_policy).max())


@dataclass
class ClassifierTrace:
    """Convergence history of an actor-critic run."""

    iterations: list[int] = field(default_factory=list)
    critic_loss: list[float] = field(default_factory=list)
    actor_objective: list[float] = field(default_factory=list)
    ema_drift: list[float] = field(default_factory=list)

    def record(self, iteration: int, loss: float, objective: float, drift: float) -> None:
        self.iterations.append(iteration)
        self.critic_loss.append(loss)
        self.actor_objective.append(objective)
        self.ema_drift.append(drift)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "iteration": self.iterations,
                "critic_loss": self.critic_loss,
                "actor_objective": self.actor_objective,
                "ema_drift": self.ema_drift,
            }
        )

    def to_csv(self, path: str | PathLike) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.10g")


class OscillationDetector:
    def __init__(self, window: int, tolerance: float):
        self.values: deque[float] = deque(maxlen=window)
        self.tolerance = tolerance

    def push(self, value: float) -> bool:
        """True once a full window swings back and forth by more than the tolerance."""
        self.values.append(value)
        if len(self.values) < self.values.maxlen:
            return False
        series = np.asarray(self.values)
        steps = np.diff(series)
        reversals = np.count_nonzero(np.sign(steps[1:]) * np.sign(steps[:-1]) < 0)
        swing = series.max() - series.min()
        return reversals > len(steps) // 2 and swing > self.tolerance


def one_step_classifier_ac(
    model: EmpiricalModel, options: ClassifierOptions | None = None
) -> tuple[QTable, TabularPolicy]:
    """Actor-regularized classifier AC: Q^β̂ from the CE critic, then π ∝ β̂ Q^β̂."""
    options = options or ClassifierOptions()
    q_beta = classifier_policy_evaluation(model, model.behavior_policy, options)
    policy = TabularPolicy.from_weights(model.behavior_policy.probs * q_beta)
    return q_beta, policy


def _train(
    model: EmpiricalModel,
    options: ClassifierOptions,
    actor: ActorState,
    logits: NDArray,
    weights_for,
    backup_for,
    improve,
    name: str,
    trace: ClassifierTrace | None,
) -> tuple[QTable, TabularPolicy]:
    mdp = model.as_mdp()
    solver = solver_for(options)
    state_dist = model.state_dist
    detector = OscillationDetector(options.oscillation_window, options.oscillation_tolerance)

    for it in range(1, options.updates + 1):
        q = np.exp(logits)
        backup = backup_for(actor)
        y = mdp.reward + mdp.discount * mdp.expected_next((backup * q).sum(axis=1))
        pos_weight, neg_weight = weights_for(actor, y)
        logits = solver.fit(logits, pos_weight, neg_weight)
        improve(actor, logits)
        actor.update_ema()

        if it % options.trace_every == 0 or it == options.updates:
            objective = float(state_dist @ policy_expectation(actor.policy, logits))
            if trace is not None:
                trace.record(
                    it, weighted_ce_loss(logits, pos_weight, neg_weight), objective, actor.drift
                )
            if detector.push(objective):
                raise SolverDivergenceError(
                    f"{name}: actor objective oscillates; try a smaller ema_rate "
                    f"than {actor.ema_rate:g}",
                    iterations=it,
                    residual=actor.drift,
                )
    logger.debug("%s finished %s updates, drift %s", name, options.updates, actor.drift)
    return np.exp(logits), TabularPolicy.from_weights(actor.policy)


def critic_reg_classifier_ac(
    model: EmpiricalModel,
    options: ClassifierOptions | None = None,
    weights: LambdaWeights | None = None,
    trace: ClassifierTrace | None = None,
) -> tuple[QTable, TabularPolicy]:
    """
    Critic-regularized classifier actor-critic.

    Every outer update (a) refreshes the TD targets under the λ_TD mixture of π̄
    and β̂, (b) fits the critic to the regularized cross-entropy loss whose
    positives are dataset actions weighted by p(s) β̂(a|s) y and whose negatives
    follow the λ_critic mixture p(s)[(1 - λ) π̄(a|s) + λ β̂(a|s)], (c) takes an
    actor step on E_π[log Q] and (d) moves π̄ toward π.

    The critic starts from the classifier estimate of Q^β̂ and the actor from β̂.
    With the default weights (both 0) the equilibrium policy matches
    ``one_step_classifier_ac``.
    """
    options = options or ClassifierOptions()
    weights = weights or LambdaWeights()
    check_nonnegative_rewards(model)
    behavior = model.behavior_policy
    beta = behavior.probs
    state_dist = model.state_dist[:, None]

    q_beta = classifier_policy_evaluation(model, behavior, options)
    logits = LogitTable.from_q(q_beta).logits
    actor = ActorState.from_policy(behavior, options.ema_rate)
    visited = model.visited_mask.astype(np.float64)

    def backup_for(actor: ActorState) -> NDArray:
        return mix_probs(actor.ema_policy, beta, weights.lambda_td)

    def weights_for(actor: ActorState, y: NDArray) -> tuple[NDArray, NDArray]:
        negatives = mix_probs(actor.ema_policy, beta, weights.lambda_critic)
        return state_dist * beta * y, state_dist * negatives

    def improve(actor: ActorState, log_q: NDArray) -> None:
        for _ in range(options.actor_steps):
            actor.ascend_log_q(log_q, visited, options.actor_lr)

    return _train(
        model,
        options,
        actor,
        logits,
        weights_for,
        backup_for,
        improve,
        "critic-reg classifier AC",
        trace,
    )


def unregularized_classifier_ac(
    model: EmpiricalModel,
    options: ClassifierOptions | None = None,
    trace: ClassifierTrace | None = None,
) -> tuple[QTable, TabularPolicy]:
    """
    Plain classifier AC: CE critic backed up under π̄, actor on E_π[log Q] from uniform.

    The actor moves to the exact maximizer of E_π[log Q] every update, the greedy
    action of Q at every state, and π̄ averages those greedy policies. The
    critic then tracks Q^π̄ and the run settles on the reward-maximizing policy
    of the empirical model. Pairs outside the support keep their standard-normal
    initial logits, which the greedy actor is free to exploit.
    """
    options = options or ClassifierOptions()
    check_nonnegative_rewards(model)
    pair_weight = model.state_action_dist
    logits = LogitTable.standard_normal(model.num_states, model.num_actions, options.seed).logits
    actor = ActorState.from_policy(
        TabularPolicy.uniform(model.num_states, model.num_actions), options.ema_rate
    )

    def weights_for(actor: ActorState, y: NDArray) -> tuple[NDArray, NDArray]:
        return pair_weight * y, pair_weight

    return _train(
        model,
        options,
        actor,
        logits,
        weights_for,
        lambda actor: actor.ema_policy,
        lambda actor, log_q: actor.take_greedy(np.exp(log_q), options.tie_tolerance),
        "unregularized classifier AC",
        trace,
    )
