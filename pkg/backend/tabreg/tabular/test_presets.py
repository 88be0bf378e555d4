import pytest

from tabreg.tabular import PRESET_NAMES, load_preset, parse_preset
from tabreg.utils import ConfigError


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_builtin_presets_build(name):
    preset = load_preset(name)
    mdp = preset.build_mdp()
    assert mdp.num_states == preset.width * preset.height
    assert mdp.discount == pytest.approx(0.95)
    assert len(preset.make_dataset(seed=0)) > 0


def test_fig3_layout():
    preset = load_preset("fig3")
    spec = preset.gridworld_spec()
    assert spec.reward_of(tuple(preset.high_cell)) == 1.0
    assert spec.reward_of(tuple(preset.low_cell)) == -10.0
    assert len(preset.blue_box) == 3
    dataset = preset.make_dataset(seed=0)
    assert len(dataset) == preset.dataset.num_traj * preset.dataset.horizon


def test_expert_path_preset_is_fixed():
    preset = load_preset("fig2-right")
    a, b = preset.make_dataset(seed=0), preset.make_dataset(seed=1)
    assert a.transitions == b.transitions
    assert a.rewards.max() == pytest.approx(0.01)


def test_preset_from_yaml_file(tmp_path):
    path = tmp_path / "tiny.yaml"
    path.write_text("name: tiny\nwidth: 2\nheight: 1\nrewards:\n  - {cell: [0, 1], value: 1.0}\n")
    preset = load_preset(path)
    assert preset.build_mdp().num_states == 2


def test_unknown_keys_name_the_path():
    with pytest.raises(ConfigError, match="dataset.num_trajs"):
        parse_preset({"name": "x", "dataset": {"num_trajs": 3}})


def test_unknown_preset():
    with pytest.raises(ConfigError, match="unknown preset"):
        load_preset("no-such-preset")


def test_preset_discount_range():
    with pytest.raises(ConfigError, match="discount"):
        parse_preset({"name": "x", "discount": 1.5})
