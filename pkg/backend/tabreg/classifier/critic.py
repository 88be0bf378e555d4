import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
from numpy.typing import NDArray
from scipy.special import expit, log_expit

from ..solvers import QTable, SolverTrace, TdTarget, td_target
from ..tabular import EmpiricalModel, TabularPolicy
from ..utils import LOGIT_CLAMP, ConvergenceError, PreconditionError, make_generator
from .protocol import CriticSolver

logger = logging.getLogger(__name__)


@dataclass
class ClassifierOptions:
    """Classifier actor-critic options.

    Attributes:
      lr: Critic step size in gradient mode. Newton mode ignores it.
      actor_lr: Step size of the softmax actor.
      critic_mode: "newton" takes second-order steps on each TD refresh until the
        inner tolerance is met. "gradient" takes ``inner_steps`` first-order steps.
      inner_steps: First-order critic steps per TD refresh in gradient mode.
        Newton mode ignores it.
      inner_tolerance: Largest logit change that ends the Newton steps.
      eval_tolerance: Sup-norm change in Q that ends policy evaluation.
      max_iters: TD-refresh budget of policy evaluation.
      updates: Outer updates of the actor-critic loops.
      ema_rate: η of the policy average π̄ <- (1 - η) π̄ + η π.
      actor_steps: Actor steps per outer update.
      seed: Seed of the standard-normal logit initialization.
      trace_every: Outer updates between trace rows.
      oscillation_window: Trace rows inspected by the oscillation detector.
      oscillation_tolerance: Actor-objective swing that counts as oscillation.
      tie_tolerance: Q gap under which the greedy actor treats actions as tied.
    """

    lr: float = 1e-2
    actor_lr: float = 1e-2
    critic_mode: Literal["newton", "gradient"] = "newton"
    inner_steps: int = 1
    inner_tolerance: float = 1e-12
    eval_tolerance: float = 1e-10
    max_iters: int = 100_000
    updates: int = 20_000
    ema_rate: float = 0.05
    actor_steps: int = 1
    seed: int = 0
    trace_every: int = 100
    oscillation_window: int = 40
    oscillation_tolerance: float = 1e-2
    tie_tolerance: float = 1e-6

    def __post_init__(self):
        if not 0.0 < self.ema_rate <= 1.0:
            raise PreconditionError("ema_rate must lie in (0,1]")
        if self.lr <= 0 or self.actor_lr <= 0:
            raise PreconditionError("learning rates must be positive")
        if self.critic_mode not in ("newton", "gradient"):
            raise PreconditionError(f"unknown critic_mode {self.critic_mode!r}")
        if self.updates < 1 or self.max_iters < 1:
            raise PreconditionError("update budgets must be at least 1")


@dataclass(frozen=True, eq=False)
class LogitTable:
    """Positive Q-values stored as logits: Q = exp(ℓ), Q / (Q + 1) = σ(ℓ)."""

    logits: NDArray[np.float64]

    def __post_init__(self):
        clamped = np.clip(np.asarray(self.logits, dtype=np.float64), -LOGIT_CLAMP, LOGIT_CLAMP)
        object.__setattr__(self, "logits", clamped)

    @classmethod
    def from_q(cls, q: NDArray) -> "LogitTable":
        with np.errstate(divide="ignore"):
            return cls(np.log(q))

    @classmethod
    def standard_normal(cls, num_states: int, num_actions: int, seed: int) -> "LogitTable":
        return cls(make_generator(seed).standard_normal((num_states, num_actions)))

    @property
    def q(self) -> NDArray[np.float64]:
        return np.exp(self.logits)

    @property
    def probabilities(self) -> NDArray[np.float64]:
        return expit(self.logits)


def weighted_ce_loss(logits: NDArray, pos_weight: NDArray, neg_weight: NDArray) -> float:
    """-Σ [A log σ(ℓ) + B log(1 - σ(ℓ))]."""
    pos = np.where(pos_weight > 0, pos_weight * log_expit(logits), 0.0)
    neg = np.where(neg_weight > 0, neg_weight * log_expit(-logits), 0.0)
    return float(-(pos + neg).sum())


def weighted_ce_grad(logits: NDArray, pos_weight: NDArray, neg_weight: NDArray) -> NDArray:
    return (pos_weight + neg_weight) * expit(logits) - pos_weight


def ce_critic_loss(logits: LogitTable, targets: TdTarget, weights: NDArray) -> float:
    """-Σ p(s,a) [y log σ(ℓ) + log(1 - σ(ℓ))], the rescaled cross-entropy critic loss."""
    y = targets.values
    if not np.isfinite(y[weights > 0]).all():
        raise PreconditionError("TD targets must be finite where weights are positive")
    if (y[weights > 0] < 0).any():
        raise PreconditionError("TD targets must be non-negative")
    return weighted_ce_loss(logits.logits, weights * y, weights)


def ce_critic_grad(logits: LogitTable, targets: TdTarget, weights: NDArray) -> NDArray:
    """Gradient p(s,a) [(y + 1) σ(ℓ) - y] of ``ce_critic_loss``."""
    return weighted_ce_grad(logits.logits, weights * targets.values, weights)


class NewtonCriticSolver:
    def __init__(self, tolerance: float = 1e-12, max_steps: int = 100):
        self.tolerance = tolerance
        self.max_steps = max_steps

    def fit(self, logits, pos_weight, neg_weight):
        total = pos_weight + neg_weight
        active = (pos_weight > 0) & (neg_weight > 0)
        safe_total = np.where(total > 0, total, 1.0)
        pos_share, neg_share = pos_weight / safe_total, neg_weight / safe_total
        out = np.where(pos_weight > 0, logits, -LOGIT_CLAMP)
        out = np.where(neg_weight > 0, out, LOGIT_CLAMP)
        out = np.where(total > 0, out, logits)
        for _ in range(self.max_steps):
            sigma, sigma_c = expit(out), expit(-out)
            # (A σ(-ℓ) - B σ(ℓ)) / (A + B), accurate on both tails
            gap = sigma * neg_share - sigma_c * pos_share
            curvature = np.maximum(sigma * sigma_c, 1e-300)
            step = np.where(active, np.clip(gap / curvature, -1.0, 1.0), 0.0)
            updated = np.clip(out - step, -LOGIT_CLAMP, LOGIT_CLAMP)
            change = np.abs(updated - out).max()
            out = updated
            if change < self.tolerance:
                break
        return out


class GradientCriticSolver:
    def __init__(self, lr: float = 1e-2, steps: int = 1):
        self.lr = lr
        self.steps = steps

    def fit(self, logits, pos_weight, neg_weight):
        scale = np.where(neg_weight > 0, neg_weight, np.where(pos_weight > 0, pos_weight, 1.0))
        out = np.array(logits, dtype=np.float64, copy=True)
        for _ in range(self.steps):
            grad = weighted_ce_grad(out, pos_weight, neg_weight) / scale
            out = np.clip(out - self.lr * grad, -LOGIT_CLAMP, LOGIT_CLAMP)
        return out


@lru_cache
def get_critic_solver(
    mode: str = "newton", lr: float = 1e-2, steps: int = 1, tolerance: float = 1e-12
) -> CriticSolver:
    if mode == "newton":
        return NewtonCriticSolver(tolerance=tolerance)
    if mode == "gradient":
        return GradientCriticSolver(lr=lr, steps=steps)
    raise PreconditionError(f"unknown critic_mode {mode!r}")


def solver_for(options: ClassifierOptions) -> CriticSolver:
    return get_critic_solver(
        options.critic_mode, options.lr, options.inner_steps, options.inner_tolerance
    )


def check_nonnegative_rewards(model: EmpiricalModel) -> None:
    r_min = model.min_reward
    if r_min < 0:
        raise PreconditionError(
            f"classifier critics need rewards >= 0 but r_min = {r_min:g}; "
            f"shift rewards by c = 1 - r_min = {1.0 - r_min:g} first"
        )


def pin_unsupported(model: EmpiricalModel, logits: NDArray) -> NDArray[np.float64]:
    """Sets the logits of pairs outside the dataset support to log max(Q_floor, 0)."""
    floor = np.full(logits.shape, max(model.value_floor, 0.0))
    return np.where(model.support_mask, logits, LogitTable.from_q(floor).logits)


def classifier_policy_evaluation(
    model: EmpiricalModel,
    backup_policy: TabularPolicy,
    options: ClassifierOptions | None = None,
    trace: SolverTrace | None = None,
    initial: LogitTable | None = None,
) -> QTable:
    """
    Evaluates ``backup_policy`` with the cross-entropy critic.

    Every round recomputes the TD targets y^{π, Q_t} exactly from the empirical
    model and then fits the logits to them, weighting each pair by p(s, a). Pairs
    outside the dataset support are pinned to ``model.value_floor`` as in
    ``sarsa_behavior_values``. With π = β̂ and a positive floor the supported
    values then equal Q^β̂ of ``model.as_mdp()``. A floor at or below zero pins
    them to exp(-LOGIT_CLAMP).

    Parameters
    ----------
    model : EmpiricalModel
        Supplies p(s, a), rewards and dynamics. Rewards must be non-negative.
    backup_policy : TabularPolicy
        π of the TD backup.
    options : ClassifierOptions, optional
        Critic mode, budgets and initialization seed. ``lr`` and ``inner_steps``
        only apply in gradient mode; Newton mode iterates to ``inner_tolerance``
        and ignores them.
    trace : SolverTrace, optional
        Receives the per-round change in Q.
    initial : LogitTable, optional
        Starting logits on the support; standard normal by default.

    Returns
    -------
    QTable
        exp of the fitted logits.
    """
    options = options or ClassifierOptions()
    check_nonnegative_rewards(model)
    backup_policy.check_compatible(model.num_states, model.num_actions)
    mdp = model.as_mdp()
    weights = model.state_action_dist
    solver = solver_for(options)
    logits = pin_unsupported(
        model,
        (
            initial
            if initial is not None
            else LogitTable.standard_normal(model.num_states, model.num_actions, options.seed)
        ).logits,
    )
    q = np.exp(logits)
    weighted = weights > 0
    residual = np.inf
    for it in range(1, options.max_iters + 1):
        y = td_target(mdp, q, backup_policy).values
        logits = solver.fit(logits, weights * y, weights)
        q_next = np.exp(logits)
        residual = float(np.abs(q_next - q)[weighted].max())
        q = q_next
        if trace is not None:
            trace.record(it, residual)
        if residual < options.eval_tolerance:
            logger.debug("Classifier evaluation converged after %s rounds", it)
            return q
    raise ConvergenceError(
        "classifier policy evaluation did not converge",
        iterations=options.max_iters,
        residual=residual,
    )
