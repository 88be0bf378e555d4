import pytest

from tabreg.config import RunConfig, parse_config
from tabreg.utils import ConfigError


def test_defaults():
    config = parse_config(["fig3"])
    assert config.discount == 0.95
    assert config.presets == ("fig3",)
    assert config.seed_list == [0]
    assert parse_config(["fig5"]).seed_list == [0, 1, 2, 3, 4]
    assert parse_config(["fig2"]).presets == ("fig2-left", "fig2-center", "fig2-right")


def test_discount_out_of_range_names_the_key():
    with pytest.raises(ConfigError, match=r"discount: discount must lie in \(0,1\)"):
        parse_config(["fig3", "--set", "discount=1.2"])


def test_unknown_key_is_rejected():
    with pytest.raises(ConfigError, match="learning_rate"):
        parse_config(["fig3", "--set", "learning_rate=0.1"])


def test_nested_override_names_the_path():
    config = parse_config(["verify-theorems", "--set", "instances.lemma1=2"])
    assert config.theorem_counts().lemma1 == 2
    with pytest.raises(ConfigError, match=r"instances\.lemma2"):
        parse_config(["verify-theorems", "--set", "instances.lemma2=0"])


def test_flags_reach_the_solvers():
    config = parse_config(
        ["fig2", "--seeds", "3,4", "--set", "lr=0.5", "--set", "cql_lambda=2"]
    )
    options = config.classifier_options()
    assert options.lr == 0.5
    assert options.seed == 3
    assert config.solver_config().cql_lambda == 2.0
    assert config.seed_list == [3, 4]


def test_later_sources_win(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("discount: 0.9\nlr: 0.1\n")
    config = parse_config(["fig3", "--config", str(path), "--set", "lr=0.2"])
    assert config.discount == 0.9
    assert config.lr == 0.2
    with pytest.raises(ConfigError, match="does not exist"):
        parse_config(["fig3", "--config", str(tmp_path / "missing.yaml")])


def test_bad_seeds():
    with pytest.raises(ConfigError, match="seeds"):
        parse_config(["fig3", "--seeds", "a,b"])


def test_config_hash_ignores_output_settings(tmp_path):
    a = RunConfig(command="fig3")
    b = RunConfig(command="fig3", out=tmp_path, verbose=True)
    c = RunConfig(command="fig3", discount=0.9)
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != c.config_hash()
    assert len(a.config_hash()) == 12
    assert b.run_dir == tmp_path / f"fig3-{a.config_hash()}"
