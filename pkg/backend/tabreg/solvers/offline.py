import logging

import numpy as np
from numpy.typing import NDArray
from scipy.special import logsumexp, wrightomega

from ..tabular import EmpiricalModel, TabularPolicy
from ..utils import PreconditionError, SolverDivergenceError
from .config import SolverConfig, SolverTrace, iterate_to_fixed_point
from .exact import QTable

logger = logging.getLogger(__name__)

_ROOT_TOL = 1e-14
_ROOT_ITERS = 200


def _supported_backup(model: EmpiricalModel, reward: NDArray, next_values: NDArray) -> NDArray:
    return reward + model.discount * np.tensordot(
        model.transition, next_values, axes=([2], [0])
    )


def q_learning_from_dataset(
    model: EmpiricalModel,
    mdp_rewards: NDArray | None = None,
    config: SolverConfig | None = None,
    trace: SolverTrace | None = None,
) -> QTable:
    """Full-batch Q-iteration on the dataset support; unseen pairs sit at the value floor."""
    config = config or SolverConfig()
    reward = model.reward if mdp_rewards is None else np.asarray(mdp_rewards, dtype=np.float64)
    support = model.support_mask
    floor = model.value_floor

    def update(q: NDArray) -> NDArray:
        backup = _supported_backup(model, reward, q.max(axis=1))
        return np.where(support, backup, floor)

    q, _ = iterate_to_fixed_point(
        update,
        np.where(support, 0.0, floor),
        config.tolerance,
        config.max_iters,
        "Q-learning",
        trace,
    )
    return q


def sarsa_behavior_values(
    model: EmpiricalModel,
    config: SolverConfig | None = None,
    trace: SolverTrace | None = None,
) -> QTable:
    """Q^β̂ by full-batch SARSA under the empirical model."""
    config = config or SolverConfig()
    support = model.support_mask
    floor = model.value_floor
    behavior = model.behavior_policy.probs

    def update(q: NDArray) -> NDArray:
        backup = _supported_backup(model, model.reward, (behavior * q).sum(axis=1))
        return np.where(support, backup, floor)

    q, _ = iterate_to_fixed_point(
        update,
        np.where(support, 0.0, floor),
        config.tolerance,
        config.max_iters,
        "SARSA evaluation",
        trace,
    )
    return q


def kl_improvement(behavior: NDArray, q: NDArray, temperature: float) -> TabularPolicy:
    """argmax_π E_π[Q] - λ KL(π || β), i.e. π ∝ β exp(Q / λ)."""
    if temperature <= 0:
        raise PreconditionError("onestep_lambda must be positive")
    with np.errstate(divide="ignore"):
        logits = np.log(behavior) + q / temperature
    logits = logits - logits.max(axis=1, keepdims=True)
    return TabularPolicy.from_weights(np.exp(logits))


def one_step_rl(
    model: EmpiricalModel,
    config: SolverConfig | None = None,
    trace: SolverTrace | None = None,
) -> tuple[QTable, TabularPolicy]:
    """SARSA estimate of Q^β̂ followed by one reverse-KL improvement step."""
    config = config or SolverConfig()
    if config.onestep_lambda <= 0:
        raise PreconditionError("onestep_lambda must be positive")
    q = sarsa_behavior_values(model, config, trace)
    return q, kl_improvement(model.behavior_policy.probs, q, config.onestep_lambda)


def _penalized_row_solve(
    y: NDArray,
    beta: NDArray,
    support: NDArray,
    floor: float,
    lam: float,
    tau: float,
    v_start: NDArray,
) -> tuple[NDArray, NDArray]:
    """
    Solves Q = y - λ(μ_Q / β - 1) with μ_Q = softmax(Q / τ), one row per state.

    Writing V = τ logsumexp(Q / τ), each supported μ_a satisfies
    log μ_a + (λ / τβ_a) μ_a = (y_a + λ - V) / τ, whose solution is a Wright omega
    value. Unsupported actions keep Q = floor. The row normalizer V is the root of
    Σ_a μ_a(V) = 1, found by safeguarded Newton steps inside a bracket.
    """
    log_c = np.log(lam / (tau * beta))
    inv_c = tau * beta / lam

    def probs_and_slope(v: NDArray) -> tuple[NDArray, NDArray]:
        z = (y + lam - v[:, None]) / tau + log_c
        omega = np.real(wrightomega(z))
        mu_sup = omega * inv_c
        slope_sup = -(omega / (1.0 + omega)) * inv_c / tau
        mu_unsup = np.exp((floor - v[:, None]) / tau)
        mu = np.where(support, mu_sup, mu_unsup)
        slope = np.where(support, slope_sup, -mu_unsup / tau)
        return mu, slope

    num_actions = y.shape[1]
    lower = np.where(support, y + lam - lam / beta, floor).min(axis=1) - 1.0
    upper = np.where(support, y + lam, floor).max(axis=1) + tau * np.log(num_actions) + 1.0
    v = np.clip(v_start, lower, upper)
    for _ in range(_ROOT_ITERS):
        mu, slope = probs_and_slope(v)
        gap = mu.sum(axis=1) - 1.0
        # Σμ decreases in V
        lower = np.where(gap > 0, v, lower)
        upper = np.where(gap < 0, v, upper)
        if np.abs(gap).max() < _ROOT_TOL:
            break
        newton = v - gap / slope.sum(axis=1)
        inside = (newton > lower) & (newton < upper)
        v = np.where(inside, newton, 0.5 * (lower + upper))
    # Q_a = y_a + λ - τ ω_a, equivalent to y - λ(μ/β - 1) but without cancellation
    omega = np.real(wrightomega((y + lam - v[:, None]) / tau + log_c))
    q = np.where(support, y + lam - tau * omega, floor)
    return q, v


def cql_soft_value_iteration(
    model: EmpiricalModel,
    config: SolverConfig | None = None,
    trace: SolverTrace | None = None,
) -> tuple[QTable, TabularPolicy]:
    """
    CQL-penalized soft value iteration on the dataset support.

    Each sweep computes y(s, a) = r(s, a) + γ E[V(s')] with the soft value
    V = τ logsumexp(Q / τ), then sets every supported row to the solution of
    Q = y - λ(μ_Q / β̂_ε - 1), μ_Q = softmax(Q / τ). Unsupported pairs stay at the
    value floor. With λ = 0 this is plain soft value iteration.

    Returns the fixed point and the softmax policy μ_Q.
    """
    config = config or SolverConfig()
    lam, tau = config.cql_lambda, config.temperature
    if lam < 0:
        raise PreconditionError("cql_lambda must be non-negative")
    support = model.support_mask
    floor = model.value_floor
    beta = np.maximum(model.behavior_policy.probs, config.beta_floor)
    num_actions = model.num_actions
    beta_min = float(beta[support].min())
    reward_scale = float(np.abs(model.reward[support]).max())
    bound = 2.0 * (
        (reward_scale + lam + lam / beta_min + tau * np.log(num_actions))
        / (1.0 - model.discount)
        + abs(floor)
    )

    state = {"v": np.full(model.num_states, floor)}

    def update(q: NDArray) -> NDArray:
        soft_values = tau * logsumexp(q / tau, axis=1)
        y = _supported_backup(model, model.reward, soft_values)
        if lam == 0:
            return np.where(support, y, floor)
        q_next, state["v"] = _penalized_row_solve(
            y, beta, support, floor, lam, tau, state["v"]
        )
        return q_next

    try:
        q, iterations = iterate_to_fixed_point(
            update,
            np.where(support, 0.0, floor),
            config.tolerance,
            config.max_iters,
            f"CQL soft value iteration (lambda={lam:g})",
            trace,
            bound=bound,
        )
    except SolverDivergenceError:
        logger.debug("CQL diverged with lambda=%s, tau=%s", lam, tau)
        raise
    logger.debug("CQL lambda=%s converged in %s sweeps", lam, iterations)
    return q, TabularPolicy.from_logits(q, tau)
