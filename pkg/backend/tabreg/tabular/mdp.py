import logging
from collections.abc import Mapping
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import NDArray

from ..utils import PreconditionError, greedy_actions, normalize_rows, row_softmax

logger = logging.getLogger(__name__)

Cell = tuple[int, int]

ACTIONS = ("up", "down", "left", "right", "nothing")
ACTION_DELTAS: tuple[Cell, ...] = ((-1, 0), (1, 0), (0, -1), (0, 1), (0, 0))
NOTHING = ACTIONS.index("nothing")

_ROW_ATOL = 1e-12
_POLICY_ATOL = 1e-9


def _frozen(array: NDArray, dtype=np.float64) -> NDArray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class GridworldSpec:
    """Layout of a deterministic gridworld.

    Attributes:
      width: Number of columns.
      height: Number of rows.
      rewards: Reward received on entering a cell, keyed by (row, col).
        Cells not listed receive ``default_reward``.
      start_cell: Cell of the initial state.
      goal_cells: Cells marked as goals. Annotation only, never absorbing.
      default_reward: Reward of cells missing from ``rewards``.
    """

    width: int
    height: int
    rewards: Mapping[Cell, float] = field(default_factory=dict)
    start_cell: Cell = (0, 0)
    goal_cells: frozenset[Cell] = frozenset()
    default_reward: float = 0.0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise PreconditionError(
                f"gridworld dimensions must be positive, got {self.height}x{self.width}"
            )
        object.__setattr__(
            self, "rewards", {tuple(c): float(r) for c, r in self.rewards.items()}
        )
        object.__setattr__(self, "start_cell", tuple(self.start_cell))
        object.__setattr__(self, "goal_cells", frozenset(tuple(c) for c in self.goal_cells))
        for cell in [*self.rewards, self.start_cell, *self.goal_cells]:
            self._check_cell(cell)

    @property
    def num_states(self) -> int:
        return self.width * self.height

    def _check_cell(self, cell: Cell) -> None:
        row, col = cell
        if not (0 <= row < self.height and 0 <= col < self.width):
            raise PreconditionError(
                f"cell {cell} lies outside the {self.height}x{self.width} grid"
            )

    def state_index(self, cell: Cell) -> int:
        self._check_cell(cell)
        return cell[0] * self.width + cell[1]

    def cell_of(self, state: int) -> Cell:
        return divmod(int(state), self.width)

    def next_cell(self, cell: Cell, action: int) -> Cell:
        d_row, d_col = ACTION_DELTAS[action]
        row, col = cell[0] + d_row, cell[1] + d_col
        if 0 <= row < self.height and 0 <= col < self.width:
            return (row, col)
        # walls clamp
        return cell

    def reward_of(self, cell: Cell) -> float:
        return self.rewards.get(tuple(cell), self.default_reward)


@dataclass(frozen=True, eq=False)
class TabularMdp:
    """Exact finite MDP.

    Attributes:
      transition: P[s, a, s'] with rows summing to one.
      reward: r[s, a].
      discount: Discount factor in (0, 1).
      initial_dist: Initial state distribution p0.
      grid: The gridworld layout when the MDP was built from one.
    """

    transition: NDArray[np.float64]
    reward: NDArray[np.float64]
    discount: float
    initial_dist: NDArray[np.float64]
    grid: GridworldSpec | None = None

    def __post_init__(self):
        transition = _frozen(self.transition)
        reward = _frozen(self.reward)
        initial = _frozen(self.initial_dist)
        if transition.ndim != 3 or transition.shape[0] != transition.shape[2]:
            raise PreconditionError(
                f"transition must have shape (S, A, S), got {transition.shape}"
            )
        if reward.shape != transition.shape[:2]:
            raise PreconditionError(
                f"reward shape {reward.shape} does not match transition {transition.shape}"
            )
        if initial.shape != (transition.shape[0],):
            raise PreconditionError(
                f"initial_dist shape {initial.shape} does not match {transition.shape[0]} states"
            )
        if not 0.0 < self.discount < 1.0:
            raise PreconditionError("discount must lie in (0,1)")
        if (transition < 0).any() or not np.allclose(
            transition.sum(axis=2), 1.0, rtol=0.0, atol=_ROW_ATOL
        ):
            raise PreconditionError("transition rows must be probability vectors")
        if (initial < 0).any() or abs(initial.sum() - 1.0) > _ROW_ATOL:
            raise PreconditionError("initial_dist must sum to 1")
        if not np.isfinite(reward).all():
            raise PreconditionError("reward table must be finite")
        object.__setattr__(self, "transition", transition)
        object.__setattr__(self, "reward", reward)
        object.__setattr__(self, "initial_dist", initial)
        object.__setattr__(self, "discount", float(self.discount))

    @property
    def num_states(self) -> int:
        return self.transition.shape[0]

    @property
    def num_actions(self) -> int:
        return self.transition.shape[1]

    @property
    def is_deterministic(self) -> bool:
        return bool(np.all(np.isclose(self.transition.max(axis=2), 1.0, atol=_ROW_ATOL)))

    def expected_next(self, state_values: NDArray) -> NDArray[np.float64]:
        """E_{s' ~ P(.|s,a)}[v(s')] for every (s, a); extra trailing axes are carried."""
        return np.tensordot(self.transition, state_values, axes=([2], [0]))

    def with_reward_offset(self, offset: float) -> "TabularMdp":
        return replace(self, reward=self.reward + offset)


@dataclass(frozen=True, eq=False)
class TabularPolicy:
    """Row-stochastic table π[s, a]."""

    probs: NDArray[np.float64]

    def __post_init__(self):
        probs = _frozen(self.probs)
        if probs.ndim != 2:
            raise PreconditionError(f"policy must have shape (S, A), got {probs.shape}")
        if (probs < 0).any() or not np.allclose(
            probs.sum(axis=1), 1.0, rtol=0.0, atol=_POLICY_ATOL
        ):
            raise PreconditionError("policy rows must be probability vectors")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, num_states: int, num_actions: int) -> "TabularPolicy":
        return cls(np.full((num_states, num_actions), 1.0 / num_actions))

    @classmethod
    def from_weights(cls, weights: NDArray) -> "TabularPolicy":
        return cls(normalize_rows(weights))

    @classmethod
    def from_logits(cls, logits: NDArray, temperature: float = 1.0) -> "TabularPolicy":
        return cls(row_softmax(logits, temperature))

    @classmethod
    def deterministic(cls, actions: NDArray, num_actions: int) -> "TabularPolicy":
        actions = np.asarray(actions, dtype=np.int64)
        probs = np.zeros((actions.size, num_actions))
        probs[np.arange(actions.size), actions] = 1.0
        return cls(probs)

    @property
    def num_states(self) -> int:
        return self.probs.shape[0]

    @property
    def num_actions(self) -> int:
        return self.probs.shape[1]

    def greedy_actions(self, atol: float = 0.0) -> NDArray[np.int64]:
        return greedy_actions(self.probs, atol)

    def check_compatible(self, num_states: int, num_actions: int) -> None:
        if self.probs.shape != (num_states, num_actions):
            raise PreconditionError(
                f"policy shape {self.probs.shape} does not match ({num_states}, {num_actions})"
            )


def build_gridworld(spec: GridworldSpec, discount: float) -> TabularMdp:
    """Deterministic 5-action gridworld; r(s, a) is the reward of the entered cell."""
    if not 0.0 < discount < 1.0:
        raise PreconditionError("discount must lie in (0,1)")
    num_states, num_actions = spec.num_states, len(ACTIONS)
    transition = np.zeros((num_states, num_actions, num_states))
    reward = np.zeros((num_states, num_actions))
    for s in range(num_states):
        cell = spec.cell_of(s)
        for a in range(num_actions):
            nxt = spec.next_cell(cell, a)
            transition[s, a, spec.state_index(nxt)] = 1.0
            reward[s, a] = spec.reward_of(nxt)
    initial = np.zeros(num_states)
    initial[spec.state_index(spec.start_cell)] = 1.0
    logger.debug(
        "Built %sx%s gridworld with %s rewarding cells",
        spec.height,
        spec.width,
        len(spec.rewards),
    )
    return TabularMdp(transition, reward, discount, initial, grid=spec)


def random_tabular_mdp(
    rng: np.random.Generator,
    num_states: int,
    num_actions: int,
    discount: float = 0.9,
    reward_range: tuple[float, float] = (0.1, 1.0),
) -> TabularMdp:
    """Dense random MDP with Dirichlet transitions and uniform rewards."""
    transition = rng.dirichlet(np.ones(num_states), size=(num_states, num_actions))
    reward = rng.uniform(*reward_range, size=(num_states, num_actions))
    initial = rng.dirichlet(np.ones(num_states))
    return TabularMdp(transition, reward, discount, initial)


def random_policy(
    rng: np.random.Generator,
    num_states: int,
    num_actions: int,
    support: NDArray[np.bool_] | None = None,
    concentration: float = 1.0,
) -> TabularPolicy:
    """Dirichlet policy; when ``support`` is given, mass is confined to it."""
    probs = rng.dirichlet(np.full(num_actions, concentration), size=num_states)
    if support is not None:
        probs = np.where(support, probs + 1e-3, 0.0)
    return TabularPolicy.from_weights(probs)
