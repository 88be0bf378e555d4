import numpy as np
import pytest

from tabreg.plotting import (
    PolicyAnnotations,
    emit_curve_svg,
    emit_histogram_svg,
    emit_policy_svg,
    policy_arrows,
)
from tabreg.tabular import (
    NOTHING,
    GridworldSpec,
    TabularPolicy,
    build_gridworld,
    random_tabular_mdp,
)
from tabreg.utils import PreconditionError, make_generator


@pytest.fixture
def grid_mdp():
    return build_gridworld(GridworldSpec(width=3, height=2, rewards={(0, 2): 1.0}), 0.9)


def test_doing_nothing_draws_no_arrows(grid_mdp):
    idle = TabularPolicy.deterministic(np.full(6, NOTHING), 5)
    assert policy_arrows(idle, grid_mdp) == []


def test_arrows_follow_the_argmax(grid_mdp):
    actions = np.array([3, 3, NOTHING, 0, 0, 0])
    arrows = policy_arrows(actions, grid_mdp)
    assert arrows == [((0, 0), 3), ((0, 1), 3), ((1, 0), 0), ((1, 1), 0), ((1, 2), 0)]
    with pytest.raises(PreconditionError, match="one action per state"):
        policy_arrows(actions[:3], grid_mdp)


def test_policy_map_is_byte_identical(grid_mdp, tmp_path):
    actions = np.array([3, 3, NOTHING, 0, 0, 0])
    annotations = PolicyAnnotations(
        title="one_step", blue_box=[(0, 1)], cell_colors={(0, 2): "tab:green"}, config_hash="abc"
    )
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_policy_svg(actions, grid_mdp, a, annotations)
    emit_policy_svg(actions, grid_mdp, b, annotations)
    assert a.read_bytes() == b.read_bytes()
    assert "config_hash=abc" in a.read_text()


def test_policy_map_needs_a_grid(tmp_path):
    mdp = random_tabular_mdp(make_generator(0), 4, 5)
    with pytest.raises(PreconditionError, match="gridworld"):
        emit_policy_svg(np.zeros(4, dtype=int), mdp, tmp_path / "x.svg")


def test_summary_charts_render(tmp_path):
    emit_histogram_svg([0.1, 0.5, 0.9, 0.9], tmp_path / "h.svg", chance_level=0.2)
    emit_curve_svg(
        [0.1, 1.0, 10.0], [0.2, 0.5, 0.4], tmp_path / "c.svg", std=[0.0, 0.1, 0.1], log_x=True
    )
    assert (tmp_path / "h.svg").read_text().lstrip().startswith("<?xml")
    assert (tmp_path / "c.svg").stat().st_size > 0
