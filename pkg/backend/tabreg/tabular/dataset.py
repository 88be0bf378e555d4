import logging
from collections.abc import Sequence
from dataclasses import dataclass, replace
from os import PathLike

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from ..utils import DatasetError, PreconditionError, spawn_generators
from .mdp import ACTIONS, NOTHING, Cell, GridworldSpec, TabularMdp, TabularPolicy

logger = logging.getLogger(__name__)

DATASET_COLUMNS = ["traj_id", "t", "s", "a", "r", "s_next"]


@dataclass(frozen=True, eq=False)
class TransitionDataset:
    """Offline transitions stored column-wise.

    Attributes:
      traj_ids: Trajectory index of every transition.
      steps: Time step within the trajectory.
      states, actions, rewards, next_states: The (s, a, r, s') columns.
      seed: Seed the dataset was sampled with, ``None`` for fixed datasets.
    """

    traj_ids: NDArray[np.int64]
    steps: NDArray[np.int64]
    states: NDArray[np.int64]
    actions: NDArray[np.int64]
    rewards: NDArray[np.float64]
    next_states: NDArray[np.int64]
    seed: int | None = None

    def __post_init__(self):
        columns = {}
        for name, dtype in (
            ("traj_ids", np.int64),
            ("steps", np.int64),
            ("states", np.int64),
            ("actions", np.int64),
            ("rewards", np.float64),
            ("next_states", np.int64),
        ):
            column = np.array(getattr(self, name), dtype=dtype, copy=True).reshape(-1)
            column.setflags(write=False)
            columns[name] = column
        if len({c.size for c in columns.values()}) != 1:
            raise DatasetError("dataset columns must have equal length")
        for name, column in columns.items():
            object.__setattr__(self, name, column)

    def __len__(self) -> int:
        return int(self.states.size)

    @property
    def transitions(self) -> list[tuple[int, int, float, int]]:
        return [
            (int(s), int(a), float(r), int(n))
            for s, a, r, n in zip(self.states, self.actions, self.rewards, self.next_states)
        ]

    @property
    def trajectories(self) -> list[range]:
        """Index ranges of each trajectory, in order of appearance."""
        if len(self) == 0:
            return []
        breaks = np.flatnonzero(np.diff(self.traj_ids)) + 1
        bounds = [0, *breaks.tolist(), len(self)]
        return [range(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "traj_id": self.traj_ids,
                "t": self.steps,
                "s": self.states,
                "a": self.actions,
                "r": self.rewards,
                "s_next": self.next_states,
            }
        )


def save_dataset_csv(dataset: TransitionDataset, path: str | PathLike) -> None:
    dataset.to_frame().to_csv(path, index=False, float_format="%.17g")


def load_dataset_csv(path: str | PathLike, seed: int | None = None) -> TransitionDataset:
    frame = pd.read_csv(path)
    missing = [c for c in DATASET_COLUMNS if c not in frame.columns]
    if missing:
        raise DatasetError(f"dataset CSV {path} is missing columns {missing}")
    return TransitionDataset(
        traj_ids=frame["traj_id"].to_numpy(),
        steps=frame["t"].to_numpy(),
        states=frame["s"].to_numpy(),
        actions=frame["a"].to_numpy(),
        rewards=frame["r"].to_numpy(),
        next_states=frame["s_next"].to_numpy(),
        seed=seed,
    )


def _draw(rng: np.random.Generator, probs: NDArray) -> int:
    cdf = np.cumsum(probs)
    index = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(index, probs.size - 1)


def sample_trajectories(
    mdp: TabularMdp,
    policy: TabularPolicy,
    num_traj: int,
    horizon: int,
    seed: int,
) -> TransitionDataset:
    """
    Rolls out ``policy`` in ``mdp``.

    Trajectory ``i`` draws from the ``i``-th child of ``SeedSequence(seed)``, so a
    trajectory's transitions do not depend on how many trajectories are sampled.

    Parameters
    ----------
    mdp : TabularMdp
        Environment to sample from; initial states come from ``mdp.initial_dist``.
    policy : TabularPolicy
        Behavior policy.
    num_traj : int
        Number of trajectories.
    horizon : int
        Transitions per trajectory.
    seed : int
        Root seed.

    Returns
    -------
    TransitionDataset
        Exactly ``num_traj * horizon`` transitions.
    """
    if horizon < 1 or num_traj < 1:
        raise PreconditionError("num_traj and horizon must be at least 1")
    try:
        policy.check_compatible(mdp.num_states, mdp.num_actions)
    except PreconditionError as e:
        raise DatasetError(f"cannot sample: {e}") from e
    size = num_traj * horizon
    columns = {
        name: np.zeros(size, dtype=np.int64)
        for name in ("traj_ids", "steps", "states", "actions", "next_states")
    }
    rewards = np.zeros(size)
    i = 0
    for traj, rng in enumerate(spawn_generators(seed, num_traj)):
        s = _draw(rng, mdp.initial_dist)
        for t in range(horizon):
            a = _draw(rng, policy.probs[s])
            s_next = _draw(rng, mdp.transition[s, a])
            columns["traj_ids"][i] = traj
            columns["steps"][i] = t
            columns["states"][i] = s
            columns["actions"][i] = a
            columns["next_states"][i] = s_next
            rewards[i] = mdp.reward[s, a]
            s = s_next
            i += 1
    logger.debug("Sampled %s transitions with seed %s", size, seed)
    return TransitionDataset(rewards=rewards, seed=seed, **columns)


def fixed_dataset(path_cells: Sequence[Cell], spec: GridworldSpec) -> TransitionDataset:
    """Single trajectory following ``path_cells``; repeated cells use "nothing"."""
    path = [tuple(cell) for cell in path_cells]
    if len(path) < 2:
        raise DatasetError("a fixed path needs at least two cells")
    states, actions, rewards, next_states = [], [], [], []
    for cell, nxt in zip(path[:-1], path[1:]):
        order = [NOTHING, *range(NOTHING)] if cell == nxt else range(len(ACTIONS))
        action = next((a for a in order if spec.next_cell(cell, a) == nxt), None)
        if action is None:
            raise DatasetError(f"illegal jump from {cell} to {nxt}")
        states.append(spec.state_index(cell))
        actions.append(action)
        rewards.append(spec.reward_of(nxt))
        next_states.append(spec.state_index(nxt))
    n = len(states)
    return TransitionDataset(
        traj_ids=np.zeros(n),
        steps=np.arange(n),
        states=states,
        actions=actions,
        rewards=rewards,
        next_states=next_states,
    )


@dataclass(frozen=True, eq=False)
class EmpiricalModel:
    """Counts-based model of an offline dataset.

    Attributes:
      counts: Transition counts N[s, a, s'] (pseudo-counts for exact models).
      reward: Mean observed reward on supported pairs; ``r_min`` elsewhere.
      transition: N[s, a, s'] / N[s, a] on supported pairs; self-loops elsewhere.
      behavior_policy: β̂(a|s); uniform on unvisited states.
      discount: Discount used by every solver run on this model.
      reward_offset: Constant already added to ``reward``.
    """

    counts: NDArray[np.float64]
    reward: NDArray[np.float64]
    transition: NDArray[np.float64]
    behavior_policy: TabularPolicy
    discount: float = 0.95
    reward_offset: float = 0.0

    @property
    def num_states(self) -> int:
        return self.counts.shape[0]

    @property
    def num_actions(self) -> int:
        return self.counts.shape[1]

    @property
    def pair_counts(self) -> NDArray[np.float64]:
        return self.counts.sum(axis=2)

    @property
    def state_action_dist(self) -> NDArray[np.float64]:
        pair = self.pair_counts
        return pair / pair.sum()

    @property
    def state_dist(self) -> NDArray[np.float64]:
        return self.state_action_dist.sum(axis=1)

    @property
    def support_mask(self) -> NDArray[np.bool_]:
        return self.pair_counts > 0

    @property
    def visited_mask(self) -> NDArray[np.bool_]:
        return self.support_mask.any(axis=1)

    @property
    def min_reward(self) -> float:
        return float(self.reward[self.support_mask].min())

    @property
    def value_floor(self) -> float:
        """Q_floor = r_min / (1 - γ) - 1, below every achievable value."""
        return self.min_reward / (1.0 - self.discount) - 1.0

    def as_mdp(self) -> TabularMdp:
        """The empirical MDP; unseen pairs self-loop with value ``value_floor``."""
        floor_reward = (1.0 - self.discount) * self.value_floor
        reward = np.where(self.support_mask, self.reward, floor_reward)
        return TabularMdp(self.transition, reward, self.discount, self.state_dist)

    def with_reward_offset(self, offset: float) -> "EmpiricalModel":
        return replace(
            self, reward=self.reward + offset, reward_offset=self.reward_offset + offset
        )

    @classmethod
    def from_mdp(
        cls,
        mdp: TabularMdp,
        behavior_policy: TabularPolicy,
        state_dist: NDArray | None = None,
    ) -> "EmpiricalModel":
        """Exact model: true dynamics, exact β and full state coverage."""
        behavior_policy.check_compatible(mdp.num_states, mdp.num_actions)
        if state_dist is None:
            state_dist = np.full(mdp.num_states, 1.0 / mdp.num_states)
        pair = np.asarray(state_dist)[:, None] * behavior_policy.probs
        if (pair.sum(axis=1) <= 0).any():
            raise PreconditionError("exact models need positive mass on every state")
        return cls(
            counts=pair[:, :, None] * mdp.transition,
            reward=np.array(mdp.reward, copy=True),
            transition=np.array(mdp.transition, copy=True),
            behavior_policy=behavior_policy,
            discount=mdp.discount,
        )


def estimate_empirical_model(
    dataset: TransitionDataset,
    num_states: int,
    num_actions: int,
    discount: float = 0.95,
) -> EmpiricalModel:
    if len(dataset) == 0:
        raise DatasetError("cannot estimate a model from an empty dataset")
    for name, column, bound in (
        ("state", dataset.states, num_states),
        ("next state", dataset.next_states, num_states),
        ("action", dataset.actions, num_actions),
    ):
        if column.min() < 0 or column.max() >= bound:
            raise DatasetError(f"{name} index out of range [0, {bound})")

    counts = np.zeros((num_states, num_actions, num_states))
    np.add.at(counts, (dataset.states, dataset.actions, dataset.next_states), 1.0)
    reward_sum = np.zeros((num_states, num_actions))
    np.add.at(reward_sum, (dataset.states, dataset.actions), dataset.rewards)

    pair = counts.sum(axis=2)
    support = pair > 0
    safe_pair = np.where(support, pair, 1.0)
    reward = np.where(support, reward_sum / safe_pair, float(dataset.rewards.min()))
    self_loops = np.broadcast_to(np.eye(num_states)[:, None, :], counts.shape)
    transition = np.where(support[:, :, None], counts / safe_pair[:, :, None], self_loops)
    behavior = TabularPolicy.from_weights(pair)

    logger.debug(
        "Empirical model: %s transitions, %s visited states, %s supported pairs",
        len(dataset),
        int(support.any(axis=1).sum()),
        int(support.sum()),
    )
    return EmpiricalModel(
        counts=counts,
        reward=reward,
        transition=transition,
        behavior_policy=behavior,
        discount=discount,
    )


def positive_reward_offset(model: EmpiricalModel) -> float:
    """c = 1 - r_min when some supported reward is negative, else 0."""
    r_min = model.min_reward
    return 1.0 - r_min if r_min < 0 else 0.0
