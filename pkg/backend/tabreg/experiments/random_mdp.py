import itertools
import logging
from dataclasses import dataclass, replace
from functools import lru_cache

from ..tabular import Cell, GridworldSpec, TabularMdp, build_gridworld
from ..utils import PreconditionError, make_generator

logger = logging.getLogger(__name__)

# Seed of the one shared shuffle of (high, low) placements.
PLACEMENT_SHUFFLE_SEED = 0


@dataclass(frozen=True)
class RandomMdpSpec:
    """A relocated-reward variant of a gridworld.

    Attributes:
      base: Layout whose size, start cell and default reward are kept. Its
        reward map is replaced by the two relocated cells.
      high_reward_value: Reward of entering the high cell.
      low_reward_value: Reward of entering the low cell.
      seed: Selects the placement; distinct seeds below n(n - 1) give distinct
        (high, low) pairs on an n-cell grid.
    """

    base: GridworldSpec
    high_reward_value: float = 1.0
    low_reward_value: float = -10.0
    seed: int = 0


@lru_cache
def _placements(width: int, height: int) -> tuple[tuple[Cell, Cell], ...]:
    cells = [(r, c) for r in range(height) for c in range(width)]
    pairs = list(itertools.permutations(cells, 2))
    order = make_generator(PLACEMENT_SHUFFLE_SEED).permutation(len(pairs))
    return tuple(pairs[i] for i in order)


def random_placement(spec: RandomMdpSpec) -> tuple[Cell, Cell]:
    """(high, low) cells for ``spec.seed``, drawn without replacement."""
    if spec.base.num_states < 2:
        raise PreconditionError("relocating two rewards needs at least two cells")
    placements = _placements(spec.base.width, spec.base.height)
    return placements[spec.seed % len(placements)]


def random_gridworld_spec(spec: RandomMdpSpec) -> GridworldSpec:
    high, low = random_placement(spec)
    return replace(
        spec.base,
        rewards={high: spec.high_reward_value, low: spec.low_reward_value},
        goal_cells=frozenset({high}),
    )


def generate_random_mdp(spec: RandomMdpSpec, discount: float = 0.95) -> TabularMdp:
    grid = random_gridworld_spec(spec)
    logger.debug("Random MDP seed %s: rewards at %s", spec.seed, grid.rewards)
    return build_gridworld(grid, discount)
