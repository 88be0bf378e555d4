import numpy as np
import pytest

from tabreg.experiments import (
    RandomMdpSpec,
    generate_random_mdp,
    random_gridworld_spec,
    random_placement,
)
from tabreg.tabular import GridworldSpec, load_preset
from tabreg.utils import PreconditionError

BASE = GridworldSpec(width=5, height=5, start_cell=(4, 0))


def test_first_hundred_seeds_give_distinct_placements():
    placements = [random_placement(RandomMdpSpec(BASE, seed=k)) for k in range(100)]
    assert len(set(placements)) == 100
    assert all(high != low for high, low in placements)


def test_generation_is_deterministic():
    a = generate_random_mdp(RandomMdpSpec(BASE, seed=7))
    b = generate_random_mdp(RandomMdpSpec(BASE, seed=7))
    np.testing.assert_array_equal(a.reward, b.reward)
    np.testing.assert_array_equal(a.transition, b.transition)


def test_relocated_rewards_replace_the_base_map():
    base = load_preset("fig3").gridworld_spec()
    spec = RandomMdpSpec(base, seed=3)
    high, low = random_placement(spec)
    grid = random_gridworld_spec(spec)
    assert grid.rewards == {high: 1.0, low: -10.0}
    assert grid.goal_cells == frozenset({high})
    assert grid.start_cell == base.start_cell
    mdp = generate_random_mdp(spec, discount=0.9)
    assert mdp.discount == 0.9
    assert mdp.reward.max() == 1.0
    assert mdp.reward.min() == -10.0


def test_single_cell_grid_is_rejected():
    with pytest.raises(PreconditionError, match="two cells"):
        random_placement(RandomMdpSpec(GridworldSpec(width=1, height=1)))
