"""Pipelines that reproduce the tabular experiments as run directories."""

import logging
import time
from collections.abc import Sequence
from dataclasses import replace

import numpy as np
import pandas as pd

from ..classifier import (
    ClassifierOptions,
    ClassifierTrace,
    LambdaWeights,
    classifier_policy_evaluation,
    critic_reg_classifier_ac,
    one_step_classifier_ac,
    unregularized_classifier_ac,
)
from ..plotting import (
    PolicyAnnotations,
    emit_curve_svg,
    emit_histogram_svg,
    emit_policy_svg,
    emit_scatter_svg,
)
from ..solvers import (
    SolverConfig,
    SolverTrace,
    cql_soft_value_iteration,
    kl_improvement,
    one_step_rl,
    policy_return,
    q_learning_from_dataset,
    sarsa_behavior_values,
    table_frame,
    value_iteration,
)
from ..tabular import (
    ACTIONS,
    Cell,
    EmpiricalModel,
    GridworldSpec,
    Preset,
    TabularMdp,
    TabularPolicy,
    TransitionDataset,
    estimate_empirical_model,
    positive_reward_offset,
    sample_trajectories,
)
from ..utils import PreconditionError, greedy_actions, log_info
from .metrics import StateSubset, action_prob_r2, argmax_similarity
from .random_mdp import RandomMdpSpec, generate_random_mdp, random_placement
from .report import ExperimentReport

logger = logging.getLogger(__name__)

FIG2_R2_THRESHOLD = 0.99
FIG4_CHANCE_MAJORITY = 0.8
FIG5_LAMBDAS = (0.1, 1.0, 10.0, 100.0, 1000.0)
FIG7_PENALTIES = (0.0, 0.25, 0.5, 0.75, 1.0)
BLUE_BOX_COLORS = {"high": "tab:green", "low": "tab:red"}


def _offline_setup(
    preset: Preset, seed: int, discount: float
) -> tuple[TabularMdp, TransitionDataset, EmpiricalModel]:
    mdp = preset.build_mdp(discount)
    dataset = preset.make_dataset(seed)
    model = estimate_empirical_model(dataset, mdp.num_states, mdp.num_actions, discount)
    return mdp, dataset, model


def _classifier_model(model: EmpiricalModel, report: ExperimentReport) -> EmpiricalModel:
    offset = positive_reward_offset(model)
    report.metric("reward_offset", offset)
    if offset:
        log_info(f"Shifting rewards by c = {offset:g} for the classifier critics")
    return model.with_reward_offset(offset)


def _cell_colors(preset: Preset) -> dict[Cell, str]:
    colors = {}
    if preset.high_cell is not None:
        colors[tuple(preset.high_cell)] = BLUE_BOX_COLORS["high"]
    if preset.low_cell is not None:
        colors[tuple(preset.low_cell)] = BLUE_BOX_COLORS["low"]
    return colors


def moves_toward(grid: GridworldSpec, state: int, action: int, target: Cell) -> bool:
    """True when taking ``action`` enters a cell strictly closer (Manhattan) to ``target``."""
    cell = grid.cell_of(state)
    nxt = grid.next_cell(cell, action)

    def distance(c: Cell) -> int:
        return abs(c[0] - target[0]) + abs(c[1] - target[1])

    return distance(nxt) < distance(cell)


def _policy_table(grid: GridworldSpec, policies: dict[str, TabularPolicy]) -> pd.DataFrame:
    num_states, num_actions = next(iter(policies.values())).probs.shape
    s, a = np.divmod(np.arange(num_states * num_actions), num_actions)
    rows, cols = np.divmod(s, grid.width)
    frame = pd.DataFrame(
        {"s": s, "row": rows, "col": cols, "a": a, "action": [ACTIONS[i] for i in a]}
    )
    for name, policy in policies.items():
        frame[name] = policy.probs.ravel()
    return frame


def _argmax_table(grid: GridworldSpec, actions: dict[str, np.ndarray]) -> pd.DataFrame:
    num_states = len(next(iter(actions.values())))
    rows, cols = np.divmod(np.arange(num_states), grid.width)
    frame = pd.DataFrame({"s": np.arange(num_states), "row": rows, "col": cols})
    for name, acts in actions.items():
        frame[name] = [ACTIONS[i] for i in acts]
    return frame


def _emit_policy_maps(
    report: ExperimentReport,
    mdp: TabularMdp,
    actions: dict[str, np.ndarray],
    preset: Preset,
    prefix: str,
) -> None:
    for name, acts in actions.items():
        annotations = PolicyAnnotations(
            title=name,
            blue_box=[tuple(c) for c in preset.blue_box],
            cell_colors=_cell_colors(preset),
            config_hash=report.config_hash,
        )
        report.figure(
            f"{prefix}_{name}",
            lambda path, acts=acts, annotations=annotations: emit_policy_svg(
                acts, mdp, path, annotations
            ),
        )


def run_fig2(
    preset: Preset,
    seed: int,
    options: ClassifierOptions,
    report: ExperimentReport,
    discount: float = 0.95,
    updates: int | None = None,
) -> ExperimentReport:
    """
    Trains the actor-regularized, critic-regularized and unregularized classifier
    actor-critics on one gridworld preset and compares their policies.
    """
    options = replace(options, updates=updates or preset.updates)
    mdp, dataset, model = _offline_setup(preset, seed, discount)
    model = _classifier_model(model, report)
    visited = model.visited_mask

    with report.timed("one_step_classifier_ac"):
        _, pi_one = one_step_classifier_ac(model, options)
    critic_trace, plain_trace = ClassifierTrace(), ClassifierTrace()
    with report.timed("critic_reg_classifier_ac"):
        _, pi_reg = critic_reg_classifier_ac(model, options, trace=critic_trace)
    with report.timed("unregularized_classifier_ac"):
        _, pi_plain = unregularized_classifier_ac(model, options, trace=plain_trace)

    policies = {"actor_reg": pi_one, "critic_reg": pi_reg, "unregularized": pi_plain}
    atol = 1e-6
    actions = {name: greedy_actions(p.probs, atol) for name, p in policies.items()}

    r2 = action_prob_r2(pi_reg, pi_one, visited)
    agreement = argmax_similarity(pi_one, pi_reg, mask=visited, atol=atol)
    report.metric("r_squared", r2.r_squared)
    report.metric("r_squared_points", r2.num_points)
    report.metric("argmax_agreement_visited", agreement.score)
    for name, policy in policies.items():
        report.metric(f"return_{name}", policy_return(mdp, policy))

    report.check(
        "R2(actor-reg, critic-reg) >= 0.99",
        r2.r_squared >= FIG2_R2_THRESHOLD,
        FIG2_R2_THRESHOLD,
        r2.r_squared,
    )
    report.check(
        "argmax agreement at visited states",
        agreement.score == 1.0,
        1.0,
        agreement.score,
    )

    if preset.dataset.kind == "path":
        expert = dict(zip(dataset.states.tolist(), dataset.actions.tolist()))
        states = np.array(sorted(expert))
        expert_actions = np.array([expert[s] for s in states])
        for name in ("actor_reg", "critic_reg"):
            follows = bool((actions[name][states] == expert_actions).all())
            report.check(f"{name} follows the expert path", follows, True, follows)
        strays = bool((actions["unregularized"][states] != expert_actions).any())
        report.check("unregularized leaves the expert path", strays, True, strays)
    elif preset.name == "fig2-center":
        differs = int((actions["unregularized"][visited] != actions["actor_reg"][visited]).sum())
        report.metric("states_unregularized_differs", differs)
        report.check(
            "unregularized argmax differs from the regularized methods",
            differs >= 1,
            ">= 1 state",
            differs,
        )

    grid = mdp.grid
    report.table("policies", _policy_table(grid, policies))
    report.table("argmax", _argmax_table(grid, actions))
    report.table("trace_critic_reg", critic_trace.to_frame())
    report.table("trace_unregularized", plain_trace.to_frame())
    _emit_policy_maps(report, mdp, actions, preset, "policy")
    report.figure(
        "action_probabilities",
        lambda path: emit_scatter_svg(
            pi_one.probs[visited],
            pi_reg.probs[visited],
            path,
            xlabel="actor-regularized π(a|s)",
            ylabel="critic-regularized π(a|s)",
            title=f"{preset.name}: R² = {r2.r_squared:.4f}",
            config_hash=report.config_hash,
        ),
    )
    return report


def _offline_baselines(
    model: EmpiricalModel,
    config: SolverConfig,
    cql_lambdas: Sequence[float],
    traces: dict[str, SolverTrace] | None = None,
) -> dict[str, TabularPolicy]:
    """Q-learning, one-step RL and CQL policies; ``traces`` collects their residuals by name."""

    def trace_for(name: str) -> SolverTrace | None:
        if traces is None:
            return None
        return traces.setdefault(name, SolverTrace(name))

    q_ql = q_learning_from_dataset(model, config=config, trace=trace_for("q_learning"))
    policies = {
        "q_learning": TabularPolicy.deterministic(
            greedy_actions(q_ql, config.tie_tolerance), model.num_actions
        ),
        "one_step": one_step_rl(model, config, trace_for("sarsa"))[1],
    }
    for lam in cql_lambdas:
        policies[f"cql_{lam:g}"] = cql_soft_value_iteration(
            model, replace(config, cql_lambda=lam), trace_for(f"cql_{lam:g}")
        )[1]
    return policies


def _emit_solver_traces(report: ExperimentReport, traces: dict[str, SolverTrace]) -> None:
    for name, trace in traces.items():
        report.table(f"trace_{name}", trace.to_frame())


def _blue_box_states(preset: Preset, grid: GridworldSpec) -> list[int]:
    if not preset.blue_box or preset.high_cell is None:
        raise PreconditionError(f"preset {preset.name} has no blue box and high cell")
    return [grid.state_index(tuple(c)) for c in preset.blue_box]


def run_fig3(
    preset: Preset,
    seed: int,
    config: SolverConfig,
    report: ExperimentReport,
    discount: float = 0.95,
) -> ExperimentReport:
    """Q-learning, one-step RL and CQL at two strengths on the blue-box gridworld."""
    mdp, _, model = _offline_setup(preset, seed, discount)
    grid = mdp.grid
    box = _blue_box_states(preset, grid)
    high = tuple(preset.high_cell)

    traces = {"value_iteration": SolverTrace("value_iteration")}
    with report.timed("value_iteration"):
        q_opt, pi_opt = value_iteration(mdp, config, traces["value_iteration"])
    with report.timed("offline_solvers"):
        baselines = _offline_baselines(model, config, (10.0, 0.1), traces)
    policies = {"optimal": pi_opt, **baselines}
    actions = {name: greedy_actions(p.probs, config.tie_tolerance) for name, p in policies.items()}

    def same(a: str, b: str) -> bool:
        return bool((actions[a][box] == actions[b][box]).all())

    def box_actions(name: str) -> list[str]:
        return [ACTIONS[i] for i in actions[name][box]]

    report.check(
        "CQL(10) matches one-step RL at the blue box",
        same("cql_10", "one_step"),
        box_actions("one_step"),
        box_actions("cql_10"),
    )
    report.check(
        "CQL(0.1) matches Q-learning at the blue box",
        same("cql_0.1", "q_learning"),
        box_actions("q_learning"),
        box_actions("cql_0.1"),
    )
    toward = [moves_toward(grid, s, actions["q_learning"][s], high) for s in box]
    report.check(
        "Q-learning moves toward the high-reward cell at the blue box",
        all(toward),
        [True] * len(box),
        toward,
    )
    one_step_toward = [moves_toward(grid, s, actions["one_step"][s], high) for s in box]
    report.check(
        "one-step RL does not move toward the high-reward cell at the blue box",
        not any(one_step_toward),
        [False] * len(box),
        one_step_toward,
    )
    for name, policy in policies.items():
        report.metric(f"return_{name}", policy_return(mdp, policy))

    box_frame = pd.DataFrame(
        {
            "s": box,
            "cell": [str(grid.cell_of(s)) for s in box],
            **{name: [ACTIONS[i] for i in acts[box]] for name, acts in actions.items()},
        }
    )
    report.table("argmax", _argmax_table(grid, actions))
    report.table("blue_box", box_frame)
    report.table("q_optimal", table_frame(q_opt, "q"))
    _emit_solver_traces(report, traces)
    _emit_policy_maps(report, mdp, actions, preset, "policy")
    return report


def _dataset_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def run_fig4(
    preset: Preset,
    seed: int,
    config: SolverConfig,
    report: ExperimentReport,
    num_mdps: int = 100,
    discount: float = 0.95,
) -> ExperimentReport:
    """
    Argmax similarity of CQL and one-step RL on random relocations of the
    blue-box gridworld, measured on visited states where CQL is suboptimal.
    """
    base = preset.gridworld_spec()
    behavior = TabularPolicy.uniform(base.num_states, len(ACTIONS))
    rows = []
    started = time.perf_counter()
    for k in range(num_mdps):
        spec = RandomMdpSpec(base=base, seed=k)
        high, low = random_placement(spec)
        mdp = generate_random_mdp(spec, discount)
        dataset = sample_trajectories(
            mdp, behavior, preset.dataset.num_traj, preset.dataset.horizon, _dataset_seed(seed, k)
        )
        model = estimate_empirical_model(dataset, mdp.num_states, mdp.num_actions, discount)
        q_opt, _ = value_iteration(mdp, config)
        optimal = TabularPolicy.from_weights(
            q_opt >= q_opt.max(axis=1, keepdims=True) - config.tie_tolerance
        )
        _, pi_one = one_step_rl(model, config)
        _, pi_cql = cql_soft_value_iteration(model, config)
        row = {"mdp": k, "high": str(high), "low": str(low)}
        try:
            similarity = argmax_similarity(
                pi_cql,
                pi_one,
                StateSubset.DEVIATING_STATES,
                reference=optimal,
                mask=model.visited_mask,
                atol=config.tie_tolerance,
            )
            row.update(score=similarity.score, num_states=int(similarity.states.size))
        except PreconditionError:
            row.update(score=np.nan, num_states=0)
        rows.append(row)
    report.runtimes["random_mdps"] = time.perf_counter() - started

    frame = pd.DataFrame(rows)
    scores = frame["score"].dropna().to_numpy()
    excluded = int(frame["score"].isna().sum())
    chance = 1.0 / len(ACTIONS)
    above = float((scores > chance).mean()) if scores.size else 0.0
    report.metric("chance_level", chance)
    report.metric("excluded_mdps", excluded)
    report.metric("fraction_above_chance", above)
    report.metric("mean_similarity", float(scores.mean()) if scores.size else None)

    report.check(
        "histogram plus excluded MDPs account for every MDP",
        scores.size + excluded == num_mdps,
        num_mdps,
        int(scores.size + excluded),
    )
    report.check(
        "most MDPs score above chance",
        above >= FIG4_CHANCE_MAJORITY,
        FIG4_CHANCE_MAJORITY,
        above,
    )

    edges = np.linspace(0.0, 1.0, 11)
    counts, _ = np.histogram(scores, bins=edges)
    report.table("similarity_per_mdp", frame)
    report.table(
        "histogram",
        pd.DataFrame(
            {"bin_low": edges[:-1], "bin_high": edges[1:], "count": counts, "chance": chance}
        ),
    )
    report.figure(
        "histogram",
        lambda path: emit_histogram_svg(
            scores,
            path,
            chance_level=chance,
            title="CQL vs one-step RL on deviating states",
            config_hash=report.config_hash,
        ),
    )
    return report


def run_fig5(
    preset: Preset,
    seeds: Sequence[int],
    config: SolverConfig,
    report: ExperimentReport,
    lambdas: Sequence[float] = FIG5_LAMBDAS,
    discount: float = 0.95,
) -> ExperimentReport:
    """All-states argmax similarity of one-step RL and CQL across CQL strengths."""
    if not lambdas:
        raise PreconditionError("the lambda grid must not be empty")
    models = [_offline_setup(preset, seed, discount)[2] for seed in seeds]
    with report.timed("one_step"):
        one_step = [one_step_rl(model, config)[1] for model in models]
    rows = []
    for lam in lambdas:
        cql_config = replace(config, cql_lambda=lam)
        with report.timed(f"cql_{lam:g}"):
            cql = [cql_soft_value_iteration(model, cql_config)[1] for model in models]
        scores = [
            argmax_similarity(a, b, atol=config.tie_tolerance).score
            for a in cql
            for b in one_step
        ]
        rows.append(
            {
                "lambda": lam,
                "mean": float(np.mean(scores)),
                "std": float(np.std(scores)),
                "comparisons": len(scores),
            }
        )
        logger.debug("CQL lambda=%s: mean similarity %s", lam, rows[-1]["mean"])

    frame = pd.DataFrame(rows)
    means = dict(zip(frame["lambda"], frame["mean"]))
    report.metric("mean_similarity", {f"{k:g}": v for k, v in means.items()})
    report.check(
        "each point aggregates every CQL/one-step pair",
        bool((frame["comparisons"] == len(seeds) ** 2).all()),
        len(seeds) ** 2,
        frame["comparisons"].tolist(),
    )
    if {0.1, 10.0, 1000.0} <= set(means):
        peak = means[10.0] > means[0.1] and means[10.0] > means[1000.0]
        report.check(
            "moderate regularization is most similar",
            peak,
            "sim(10) > sim(0.1) and sim(10) > sim(1000)",
            {f"{k:g}": means[k] for k in (0.1, 10.0, 1000.0)},
        )
    report.table("similarity_vs_lambda", frame)
    report.figure(
        "similarity_vs_lambda",
        lambda path: emit_curve_svg(
            frame["lambda"].tolist(),
            frame["mean"].tolist(),
            path,
            std=frame["std"].tolist(),
            xlabel="CQL regularization λ",
            log_x=True,
            config_hash=report.config_hash,
        ),
    )
    return report


def run_fig7(
    preset: Preset,
    seed: int,
    options: ClassifierOptions,
    report: ExperimentReport,
    penalties: Sequence[float] = FIG7_PENALTIES,
    discount: float = 0.95,
    updates: int | None = None,
) -> ExperimentReport:
    """
    Similarity of the actor-regularized classifier AC to the λ-weighted
    critic-regularized one, sweeping the critic penalty c with
    λ_critic = λ_TD = 1 - c. c = 1 is the fully critic-regularized method.
    """
    if not penalties or any(not 0.0 <= c <= 1.0 for c in penalties):
        raise PreconditionError("critic penalties must be a non-empty subset of [0, 1]")
    options = replace(options, updates=updates or preset.updates)
    _, _, model = _offline_setup(preset, seed, discount)
    model = _classifier_model(model, report)
    visited = model.visited_mask
    _, pi_one = one_step_classifier_ac(model, options)
    rows = []
    for c in penalties:
        weights = LambdaWeights(lambda_critic=1.0 - c, lambda_td=1.0 - c)
        with report.timed(f"critic_reg_c_{c:g}"):
            _, pi_reg = critic_reg_classifier_ac(model, options, weights)
        score = argmax_similarity(pi_one, pi_reg, mask=visited).score
        rows.append({"penalty": c, "lambda_mixture": 1.0 - c, "similarity": score})

    frame = pd.DataFrame(rows)
    scores = dict(zip(frame["penalty"], frame["similarity"]))
    report.metric("similarity", {f"{k:g}": v for k, v in scores.items()})
    if 1.0 in scores:
        best = max(scores.values())
        report.check(
            "similarity peaks at the full critic penalty",
            scores[1.0] >= best,
            best,
            scores[1.0],
        )
        report.check(
            "full critic penalty reproduces the actor-regularized policy",
            scores[1.0] == 1.0,
            1.0,
            scores[1.0],
        )
        if 0.0 in scores:
            report.check(
                "no critic penalty is less similar than the full penalty",
                scores[0.0] < scores[1.0],
                f"< {scores[1.0]}",
                scores[0.0],
            )
    report.table("similarity_vs_penalty", frame)
    report.figure(
        "similarity_vs_penalty",
        lambda path: emit_curve_svg(
            frame["penalty"].tolist(),
            frame["similarity"].tolist(),
            path,
            xlabel="critic penalty c",
            config_hash=report.config_hash,
        ),
    )
    return report


def run_fig_cac(
    preset: Preset,
    seed: int,
    config: SolverConfig,
    options: ClassifierOptions,
    report: ExperimentReport,
    discount: float = 0.95,
    updates: int | None = None,
) -> ExperimentReport:
    """Six methods on the blue-box gridworld, classifier actor-critics included."""
    options = replace(options, updates=updates or preset.updates)
    mdp, _, model = _offline_setup(preset, seed, discount)
    grid = mdp.grid
    box = _blue_box_states(preset, grid)

    with report.timed("offline_solvers"):
        policies = _offline_baselines(model, config, (10.0,))
    shifted = _classifier_model(model, report)
    with report.timed("classifier_ac"):
        policies["classifier_unregularized"] = unregularized_classifier_ac(shifted, options)[1]
        policies["classifier_actor_reg"] = one_step_classifier_ac(shifted, options)[1]
        policies["classifier_critic_reg"] = critic_reg_classifier_ac(shifted, options)[1]
    # π ∝ β̂ Q is the reverse-KL improvement of log Q at unit temperature
    q_shifted = sarsa_behavior_values(shifted, config)
    policies["one_step_log_q"] = kl_improvement(
        shifted.behavior_policy.probs, np.log(q_shifted), 1.0
    )
    actions = {name: greedy_actions(p.probs, config.tie_tolerance) for name, p in policies.items()}

    def box_actions(name: str) -> list[str]:
        return [ACTIONS[i] for i in actions[name][box]]

    actor, critic = actions["classifier_actor_reg"], actions["classifier_critic_reg"]
    mismatched = np.flatnonzero(actor != critic).tolist()
    report.check(
        "actor-reg and critic-reg classifier AC agree at every state",
        not mismatched,
        [],
        mismatched,
    )
    for name in ("classifier_actor_reg", "classifier_critic_reg"):
        matches = bool((actions[name][box] == actions["one_step_log_q"][box]).all())
        report.check(
            f"{name} matches one-step RL on log Q at the blue box",
            matches,
            box_actions("one_step_log_q"),
            box_actions(name),
        )
        report.metric(
            f"{name}_matches_one_step_blue_box",
            bool((actions[name][box] == actions["one_step"][box]).all()),
        )
    returns = {name: policy_return(mdp, p) for name, p in policies.items()}
    for name, value in returns.items():
        report.metric(f"return_{name}", value)
    gap = abs(returns["classifier_unregularized"] - returns["q_learning"])
    tolerance = 1e-3 * max(1.0, abs(returns["q_learning"]))
    report.check(
        "unregularized classifier AC earns the Q-learning return",
        gap <= tolerance,
        returns["q_learning"],
        returns["classifier_unregularized"],
        tolerance,
    )

    report.table("argmax", _argmax_table(grid, actions))
    box_frame = pd.DataFrame(
        {"s": box, **{name: [ACTIONS[i] for i in acts[box]] for name, acts in actions.items()}}
    )
    report.table("blue_box", box_frame)
    _emit_policy_maps(report, mdp, actions, preset, "policy")
    return report


def run_bench(
    preset: Preset,
    seed: int,
    config: SolverConfig,
    options: ClassifierOptions,
    report: ExperimentReport,
    repeats: int = 3,
    discount: float = 0.95,
) -> ExperimentReport:
    """Wall-clock time of every solver on one preset, best of ``repeats``."""
    mdp, _, model = _offline_setup(preset, seed, discount)
    shifted = model.with_reward_offset(positive_reward_offset(model))
    solvers = {
        "value_iteration": lambda: value_iteration(mdp, config),
        "q_learning_from_dataset": lambda: q_learning_from_dataset(model, config=config),
        "one_step_rl": lambda: one_step_rl(model, config),
        "cql_soft_value_iteration": lambda: cql_soft_value_iteration(model, config),
        "classifier_policy_evaluation": lambda: classifier_policy_evaluation(
            shifted, shifted.behavior_policy, options
        ),
        "critic_reg_classifier_ac": lambda: critic_reg_classifier_ac(shifted, options),
    }
    rows = []
    for name, solve in solvers.items():
        timings = []
        for _ in range(repeats):
            start = time.perf_counter()
            solve()
            timings.append(time.perf_counter() - start)
        report.runtimes[name] = min(timings)
        rows.append({"solver": name, "best_seconds": min(timings), "repeats": repeats})
        log_info(f"{name}: {min(timings):.3f}s")
    traces = {name: SolverTrace(name) for name in ("value_iteration", "sarsa", "cql")}
    value_iteration(mdp, config, traces["value_iteration"])
    sarsa_behavior_values(model, config, traces["sarsa"])
    cql_soft_value_iteration(model, config, traces["cql"])
    report.metric("value_iteration_sweeps", len(traces["value_iteration"]))
    report.table("bench", pd.DataFrame(rows))
    _emit_solver_traces(report, traces)
    return report
