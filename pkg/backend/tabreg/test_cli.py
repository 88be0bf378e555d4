import json

import pytest

from tabreg.cli import main
from tabreg.utils import EXIT_CONFIG_ERROR, EXIT_OK


def test_bad_config_exits_with_two(tmp_path, capsys):
    code = main(["fig3", "--out", str(tmp_path), "--set", "discount=1.2"])
    assert code == EXIT_CONFIG_ERROR
    assert "discount" in capsys.readouterr().out
    assert list(tmp_path.iterdir()) == []


def test_unknown_command_is_a_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main(["fig9"])
    assert excinfo.value.code == 2


def test_verify_theorems_writes_a_summary(tmp_path):
    argv = ["verify-theorems", "--out", str(tmp_path)]
    for key in ("lemma1", "lemma2", "theorem_b", "theorem_c", "theorem_d"):
        argv += ["--set", f"instances.{key}=1"]
    assert main(argv) == EXIT_OK
    (run_dir,) = tmp_path.iterdir()
    assert run_dir.name.startswith("verify-theorems-")
    summary = json.loads((run_dir / "summary.json").read_text())
    assert summary["passed"]
    assert summary["config_hash"] == run_dir.name.removeprefix("verify-theorems-")
    assert (run_dir / "config.yaml").exists()


def test_fig3_run_directory(tmp_path):
    assert main(["fig3", "--out", str(tmp_path)]) == 0
    (run_dir,) = tmp_path.iterdir()
    assert (run_dir / "blue_box.csv").read_text().startswith("# config_hash=")
    assert (run_dir / "summary.json").exists()


def test_several_seeds_get_their_own_directories(tmp_path):
    main(["fig3", "--out", str(tmp_path), "--seeds", "0,1"])
    (run_dir,) = tmp_path.iterdir()
    assert sorted(p.name for p in run_dir.iterdir()) == ["seed-0", "seed-1"]
