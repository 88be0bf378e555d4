import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from ..tabular import TabularMdp, TabularPolicy
from ..utils import ConvergenceError, greedy_actions
from .config import SolverConfig, SolverTrace, iterate_to_fixed_point

logger = logging.getLogger(__name__)

QTable = NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class TdTarget:
    """y(s, a) = r(s, a) + γ E_{s'}[Σ_a' backup_policy(a'|s') Q(s', a')]."""

    values: NDArray[np.float64]
    backup_policy: TabularPolicy


def table_frame(table: NDArray, column: str = "value") -> pd.DataFrame:
    """Long (s, a, column) frame of a Q-table or policy table, for CSV export."""
    table = np.asarray(table, dtype=np.float64)
    s, a = np.divmod(np.arange(table.size), table.shape[1])
    return pd.DataFrame({"s": s, "a": a, column: table.ravel()})


def policy_expectation(policy_probs: NDArray, q: NDArray) -> NDArray[np.float64]:
    """Σ_a π(a|s) Q(s, a); entries with π = 0 are skipped so +inf sentinels drop out."""
    q = np.asarray(q, dtype=np.float64)
    probs = policy_probs.reshape(policy_probs.shape + (1,) * (q.ndim - 2))
    return np.where(probs > 0, probs * np.where(probs > 0, q, 0.0), 0.0).sum(axis=1)


def td_target(mdp: TabularMdp, q: NDArray, backup_policy: TabularPolicy) -> TdTarget:
    next_values = policy_expectation(backup_policy.probs, q)
    reward = mdp.reward.reshape(mdp.reward.shape + (1,) * (np.ndim(q) - 2))
    values = reward + mdp.discount * mdp.expected_next(next_values)
    return TdTarget(values, backup_policy)


def solve_policy_values(
    transition: NDArray,
    reward: NDArray,
    policy_probs: NDArray,
    discount: float,
) -> NDArray[np.float64]:
    """
    Direct solve of the linear Bellman system for Q^π.

    Parameters
    ----------
    transition : NDArray
        P[s, a, s'].
    reward : NDArray
        r[s, a], or r[s, a, k] to evaluate k reward functions at once.
    policy_probs : NDArray
        π[s, a].
    discount : float
        γ in (0, 1).

    Returns
    -------
    NDArray[np.float64]
        Q^π with the shape of ``reward``.
    """
    num_states = transition.shape[0]
    state_transition = np.einsum("sa,sat->st", policy_probs, transition)
    state_reward = np.einsum("sa,sa...->s...", policy_probs, reward)
    values = np.linalg.solve(np.eye(num_states) - discount * state_transition, state_reward)
    return reward + discount * np.tensordot(transition, values, axes=([2], [0]))


def policy_evaluation_exact(mdp: TabularMdp, policy: TabularPolicy) -> QTable:
    """Q^π of ``mdp`` to within 1e-10; the oracle every other solver is tested against."""
    policy.check_compatible(mdp.num_states, mdp.num_actions)
    q = solve_policy_values(mdp.transition, mdp.reward, policy.probs, mdp.discount)
    residual = float(np.abs(td_target(mdp, q, policy).values - q).max())
    scale = max(1.0, float(np.abs(q).max()))
    if residual > 1e-10 * scale:
        raise ConvergenceError("policy evaluation residual too large", 1, residual)
    return q


def policy_return(mdp: TabularMdp, policy: TabularPolicy) -> float:
    """Σ_s p0(s) V^π(s) under the true MDP."""
    q = policy_evaluation_exact(mdp, policy)
    return float(mdp.initial_dist @ policy_expectation(policy.probs, q))


def value_iteration(
    mdp: TabularMdp,
    config: SolverConfig | None = None,
    trace: SolverTrace | None = None,
) -> tuple[QTable, TabularPolicy]:
    """Q* by Bellman-optimality iteration and its greedy policy (lowest index wins ties)."""
    config = config or SolverConfig()

    def update(q: NDArray) -> NDArray:
        return mdp.reward + mdp.discount * mdp.expected_next(q.max(axis=1))

    q, _ = iterate_to_fixed_point(
        update,
        np.zeros((mdp.num_states, mdp.num_actions)),
        config.tolerance,
        config.max_iters,
        "value iteration",
        trace,
    )
    actions = greedy_actions(q, config.tie_tolerance)
    return q, TabularPolicy.deterministic(actions, mdp.num_actions)
