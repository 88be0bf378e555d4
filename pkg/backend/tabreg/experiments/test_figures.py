import math

import pandas as pd
import pytest

from tabreg.classifier import ClassifierOptions
from tabreg.config import FIG5_DEFAULT_SEEDS
from tabreg.experiments import (
    FIG5_LAMBDAS,
    FIG7_PENALTIES,
    ExperimentReport,
    moves_toward,
    run_bench,
    run_fig2,
    run_fig3,
    run_fig4,
    run_fig5,
    run_fig7,
    run_fig_cac,
)
from tabreg.solvers import SolverConfig
from tabreg.tabular import GridworldSpec, load_preset
from tabreg.utils import PreconditionError


def _check(report: ExperimentReport, name: str) -> bool:
    return next(a.passed for a in report.assertions if a.name == name)


def _table(report: ExperimentReport, name: str) -> pd.DataFrame:
    return pd.read_csv(report.run_dir / report.tables[name], comment="#")


def test_moves_toward_uses_manhattan_distance():
    grid = GridworldSpec(width=5, height=5)
    state = grid.state_index((1, 3))
    target = (0, 4)
    assert moves_toward(grid, state, 0, target)  # up
    assert moves_toward(grid, state, 3, target)  # right
    assert not moves_toward(grid, state, 2, target)
    assert not moves_toward(grid, state, 4, target)


def test_sweeps_reject_bad_grids():
    preset = load_preset("fig3")
    report = ExperimentReport("fig5", "test")
    with pytest.raises(PreconditionError, match="lambda grid"):
        run_fig5(preset, [0], SolverConfig(), report, lambdas=())
    with pytest.raises(PreconditionError, match="penalties"):
        run_fig7(preset, 0, ClassifierOptions(), report, penalties=(1.5,))


def test_fig3_writes_its_tables(tmp_path):
    report = ExperimentReport("fig3", "h", tmp_path)
    run_fig3(load_preset("fig3"), 0, SolverConfig(), report)
    box = _table(report, "blue_box")
    assert len(box) == 3
    assert {"q_learning", "one_step", "cql_10", "cql_0.1", "optimal"} <= set(box.columns)
    assert len(_table(report, "q_optimal")) == 25 * 5
    assert (tmp_path / "policy_one_step.svg").exists()
    assert math.isfinite(report.metrics["return_optimal"])
    for name in ("value_iteration", "q_learning", "sarsa", "cql_10", "cql_0.1"):
        trace = _table(report, f"trace_{name}")
        assert list(trace.columns) == ["iteration", "residual"]
        assert trace["residual"].iloc[-1] <= SolverConfig().tolerance


def test_fig3_blue_box_claims_hold(tmp_path):
    report = run_fig3(load_preset("fig3"), 0, SolverConfig(), ExperimentReport("fig3", "h"))
    assert _check(report, "CQL(10) matches one-step RL at the blue box")
    assert _check(report, "CQL(0.1) matches Q-learning at the blue box")
    assert _check(report, "Q-learning moves toward the high-reward cell at the blue box")
    assert _check(report, "one-step RL does not move toward the high-reward cell at the blue box")
    assert report.passed


@pytest.mark.slow
def test_fig4_majority_above_chance(tmp_path):
    report = run_fig4(
        load_preset("fig3"), 0, SolverConfig(), ExperimentReport("fig4", "h", tmp_path)
    )
    assert _check(report, "histogram plus excluded MDPs account for every MDP")
    assert len(_table(report, "similarity_per_mdp")) == 100
    assert _table(report, "histogram")["count"].sum() + report.metrics["excluded_mdps"] == 100
    assert report.passed


@pytest.mark.slow
def test_fig5_peaks_at_the_one_step_temperature(tmp_path):
    report = run_fig5(
        load_preset("fig3"),
        list(FIG5_DEFAULT_SEEDS),
        SolverConfig(),
        ExperimentReport("fig5", "h", tmp_path),
    )
    assert _check(report, "each point aggregates every CQL/one-step pair")
    frame = _table(report, "similarity_vs_lambda")
    assert frame["comparisons"].tolist() == [25] * len(FIG5_LAMBDAS)
    assert "similarity_vs_lambda" in report.figures
    assert report.passed


@pytest.mark.slow
@pytest.mark.parametrize("name", ["fig2-left", "fig2-center", "fig2-right"])
def test_fig2_presets(tmp_path, name):
    report = run_fig2(
        load_preset(name), 0, ClassifierOptions(), ExperimentReport("fig2", "h", tmp_path)
    )
    assert _check(report, "R2(actor-reg, critic-reg) >= 0.99")
    assert _check(report, "argmax agreement at visited states")
    assert {"policies", "argmax", "trace_critic_reg"} <= set(report.tables)
    assert "action_probabilities" in report.figures
    assert report.passed


@pytest.mark.slow
def test_fig7_sweeps_the_critic_penalty(tmp_path):
    report = run_fig7(
        load_preset("fig2-left"), 0, ClassifierOptions(), ExperimentReport("fig7", "h", tmp_path)
    )
    frame = _table(report, "similarity_vs_penalty")
    assert frame["lambda_mixture"].tolist() == [1.0 - c for c in FIG7_PENALTIES]
    assert report.passed


@pytest.mark.slow
def test_classifier_comparison(tmp_path):
    report = run_fig_cac(
        load_preset("fig3"),
        0,
        SolverConfig(),
        ClassifierOptions(),
        ExperimentReport("fig-cac", "h", tmp_path),
    )
    assert len(_table(report, "blue_box")) == 3
    assert report.metrics["reward_offset"] == pytest.approx(11.0)
    assert _check(report, "actor-reg and critic-reg classifier AC agree at every state")
    for name in ("classifier_actor_reg", "classifier_critic_reg"):
        assert _check(report, f"{name} matches one-step RL on log Q at the blue box")
    assert _check(report, "unregularized classifier AC earns the Q-learning return")
    assert report.passed


@pytest.mark.slow
def test_bench_times_every_solver(tmp_path):
    bench = run_bench(
        load_preset("fig3"),
        0,
        SolverConfig(),
        ClassifierOptions(updates=200),
        ExperimentReport("bench", "h", tmp_path),
        repeats=1,
    )
    assert len(_table(bench, "bench")) == 6
    assert bench.metrics["value_iteration_sweeps"] > 0
    for name in ("value_iteration", "sarsa", "cql"):
        assert len(_table(bench, f"trace_{name}")) > 0
