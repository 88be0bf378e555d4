import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from ..tabular import TabularPolicy
from ..utils import PreconditionError, greedy_actions

logger = logging.getLogger(__name__)


class StateSubset(str, Enum):
    ALL_STATES = "all_states"
    DEVIATING_STATES = "deviating_states"


@dataclass(frozen=True, eq=False)
class SimilarityReport:
    """Argmax agreement between two policies.

    Attributes:
      per_state_match: Agreement at each state of the subset, in state order.
      states: Indices of the states in the subset.
      score: Mean of ``per_state_match``.
      state_subset: How the subset was chosen.
      chance_level: Agreement a uniformly random policy would reach.
    """

    per_state_match: NDArray[np.bool_]
    states: NDArray[np.int64]
    score: float
    state_subset: StateSubset
    chance_level: float


@dataclass(frozen=True)
class R2Report:
    r_squared: float
    num_points: int
    state_mask: tuple[bool, ...]


def argmax_similarity(
    policy_a: TabularPolicy,
    policy_b: TabularPolicy,
    subset: StateSubset = StateSubset.ALL_STATES,
    reference: TabularPolicy | None = None,
    mask: NDArray[np.bool_] | None = None,
    atol: float = 1e-6,
) -> SimilarityReport:
    """
    Fraction of states where two policies pick the same greedy action.

    Parameters
    ----------
    policy_a, policy_b : TabularPolicy
        Policies of equal shape. Ties break toward the lowest action index.
    subset : StateSubset
        ``ALL_STATES`` compares every state (optionally restricted by ``mask``).
        ``DEVIATING_STATES`` keeps only states where ``policy_a``'s argmax is not
        among the maximizers of ``reference``.
    reference : TabularPolicy, optional
        The reward-maximizing policy, possibly spreading mass over tied optimal
        actions; required for ``DEVIATING_STATES``.
    mask : NDArray, optional
        Extra state filter applied before the subset rule.
    atol : float
        Tie tolerance of the argmax.

    Returns
    -------
    SimilarityReport
        Raises PreconditionError when the subset is empty.
    """
    if policy_a.probs.shape != policy_b.probs.shape:
        raise PreconditionError("policies must have the same shape")
    actions_a = greedy_actions(policy_a.probs, atol)
    actions_b = greedy_actions(policy_b.probs, atol)
    keep = np.ones(policy_a.num_states, dtype=bool) if mask is None else np.asarray(mask, bool)
    if subset == StateSubset.DEVIATING_STATES:
        if reference is None:
            raise PreconditionError("deviating_states needs a reference policy")
        ref = reference.probs
        chosen = ref[np.arange(ref.shape[0]), actions_a]
        keep = keep & (chosen < ref.max(axis=1) - atol)
    states = np.flatnonzero(keep)
    if states.size == 0:
        raise PreconditionError(f"the {StateSubset(subset).value} subset is empty")
    match = actions_a[states] == actions_b[states]
    return SimilarityReport(
        per_state_match=match,
        states=states,
        score=float(match.mean()),
        state_subset=StateSubset(subset),
        chance_level=1.0 / policy_a.num_actions,
    )


def action_prob_r2(
    prediction: TabularPolicy,
    target: TabularPolicy,
    visited_mask: NDArray[np.bool_] | None = None,
) -> R2Report:
    """R² = 1 - SS_res / SS_tot over all actions of the visited states."""
    if prediction.probs.shape != target.probs.shape:
        raise PreconditionError("policies must have the same shape")
    if visited_mask is None:
        visited_mask = np.ones(target.num_states, dtype=bool)
    visited_mask = np.asarray(visited_mask, dtype=bool)
    y = target.probs[visited_mask].ravel()
    y_hat = prediction.probs[visited_mask].ravel()
    if y.size < 2:
        raise PreconditionError("R² needs at least two points")
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot <= 0:
        raise PreconditionError("R² is undefined for a constant target")
    ss_res = float(((y - y_hat) ** 2).sum())
    return R2Report(1.0 - ss_res / ss_tot, int(y.size), tuple(bool(v) for v in visited_mask))
